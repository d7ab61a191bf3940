#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bdperiod/chain_model.hpp"
#include "bdperiod/rng.hpp"
#include "bdperiod/series_analysis.hpp"

namespace bdperiod {

/// max(1e4, steps / 100)
std::uint64_t default_burn_in(std::uint64_t steps);

inline constexpr std::size_t kDefaultWindow = 1024;
inline constexpr double kResidueConcentration = 0.95;
inline constexpr std::uint64_t kResidueMinSamples = 20;

struct SimulationConfig {
  std::uint64_t seed = 0;
  State x0 = 0;
  std::uint64_t steps = 1'000'000;
  std::optional<std::uint64_t> burn_in;  ///< default_burn_in(steps) when unset
  std::vector<std::uint32_t> moduli;     ///< residue analysis for each m
  std::size_t window = kDefaultWindow;
  bool track_occupation = false;

  std::uint64_t effective_burn_in() const { return burn_in ? *burn_in : default_burn_in(steps); }
};

/// Cached jump thresholds for states 0..max_state: left if u < q, stay if
/// u < q + r, right otherwise. Shared read-only across a fleet.
class RowTable {
 public:
  RowTable(const ChainSpec& chain, State max_state);

  State max_state() const { return static_cast<State>(left_.size()) - 1; }
  double left(State i) const { return left_[i]; }
  double stay(State i) const { return stay_[i]; }

 private:
  std::vector<double> left_;
  std::vector<double> stay_;
};

/**
 * Advance a path of `steps` transitions from x0, calling
 * obs(n, X(n), X(n+1)) for n = 0..steps-1. The table must cover x0 + steps.
 */
template <class Observer>
State simulate(const RowTable& rows, std::uint64_t seed, State x0, std::uint64_t steps,
               Observer&& obs) {
  Xoshiro256 rng(seed);
  State x = x0;
  for (std::uint64_t n = 0; n < steps; ++n) {
    const double u = rng.uniform01();
    State y = x;
    if (u < rows.left(x))
      y = x - 1;
    else if (u >= rows.stay(x))
      y = x + 1;
    obs(n, x, y);
    x = y;
  }
  return x;
}

enum class EmpiricalPeriod { One, Two, InfiniteSignature, Inconclusive };
std::string_view to_string(EmpiricalPeriod p);
EmpiricalPeriod empirical_period_from_string(std::string_view s);

/**
 * Residue analysis of the m-step chain. After burn-in every visit
 * (n, X(n)) contributes its orbit key (n - X(n)) mod m: a cyclic class
 * C_a = {j : visits to j happen at times n = j + a mod b} shows up as all
 * keys falling in one coset a + bZ_m. The estimate is the largest divisor b
 * of m whose best coset holds at least 95% of the keys.
 */
struct ResidueEstimate {
  std::uint32_t m = 1;
  std::vector<std::uint64_t> key_counts;  ///< size m
  std::uint64_t samples = 0;
  std::optional<std::uint32_t> classes;   ///< nullopt = Inconclusive
  double concentration = 0.0;             ///< best-coset share for `classes`

  friend bool operator==(const ResidueEstimate&, const ResidueEstimate&) = default;
};

/// Estimate from key counts; Inconclusive with fewer than 20 samples.
ResidueEstimate estimate_residue_classes(std::uint32_t m, std::vector<std::uint64_t> key_counts);

struct ReturnsToOrigin {
  std::uint64_t count = 0;
  std::optional<std::uint64_t> last_index;  ///< time index n with X(n) = x0, n >= 1
  friend bool operator==(const ReturnsToOrigin&, const ReturnsToOrigin&) = default;
};

struct EmpiricalReport {
  std::uint64_t seed = 0;
  State x0 = 0;
  std::uint64_t steps = 0;
  std::uint64_t burn_in = 0;
  State final_state = 0;
  State max_state = 0;
  std::uint64_t right_moves = 0;
  /// Step index n of the last transition X(n) -> X(n+1) that was not +1.
  std::optional<std::uint64_t> last_nonright_step;
  std::optional<std::uint64_t> last_self_step;
  /// First n* with (X(n) + n) mod 2 constant for n >= n*.
  std::optional<std::uint64_t> parity_lock_step;
  std::vector<ResidueEstimate> residue_classes;
  ReturnsToOrigin returns_to_origin;
  EmpiricalPeriod period_estimate = EmpiricalPeriod::Inconclusive;
  /// Visits to x0 in the first and second half of the time range.
  std::uint64_t origin_visits_first_half = 0;
  std::uint64_t origin_visits_second_half = 0;
  /// Visit counts of states 0..max_state over n = 1..steps; only with
  /// SimulationConfig::track_occupation.
  std::vector<std::uint64_t> occupation;
  /// Last `window` states, oldest first.
  std::vector<State> tail_window;

  friend bool operator==(const EmpiricalReport&, const EmpiricalReport&) = default;
};

/**
 * Period signature after burn-in:
 *   no non-right move                       -> InfiniteSignature
 *   no self-transition                      -> 2 (parity of X(n)+n locked)
 *   both parities of X(n) at even times n   -> 1
 *   otherwise                               -> Inconclusive
 */
EmpiricalPeriod detect_period(std::optional<std::uint64_t> last_nonright_step,
                              std::optional<std::uint64_t> last_self_step,
                              bool even_time_parities_mixed, std::uint64_t burn_in);

/// One seeded trajectory with every detector attached. Requires steps > burn-in.
EmpiricalReport run_trajectory(const ChainSpec& chain, const SimulationConfig& config);
EmpiricalReport run_trajectory(const RowTable& rows, const SimulationConfig& config);

/// Fleet over `seeds` (config.seed is ignored), results in seed order.
/// run_fleet runs members concurrently with OpenMP; run_fleet_serial is
/// the single-threaded reference and must agree exactly.
std::vector<EmpiricalReport> run_fleet(const ChainSpec& chain, const SimulationConfig& config,
                                       const std::vector<std::uint64_t>& seeds);
std::vector<EmpiricalReport> run_fleet_serial(const ChainSpec& chain,
                                              const SimulationConfig& config,
                                              const std::vector<std::uint64_t>& seeds);

enum class EmpiricalClass { TransientConsistent, NullRecurrentConsistent, PositiveRecurrentConsistent };
std::string_view to_string(EmpiricalClass c);
EmpiricalClass empirical_class_from_string(std::string_view s);

/// Second-half / first-half ratio of fleet visits to x0 below which the
/// occupation is treated as not stabilizing (null recurrence).
inline constexpr double kNullOccupationRatio = 0.8;

struct ReturnStatistics {
  std::size_t runs = 0;
  std::size_t returned_runs = 0;
  double return_fraction = 0.0;
  /// P(return to x0) from the potential coefficients: 1 when L diverges,
  /// otherwise 1 - (1/pi_x0) / sum_{j>=x0} 1/(p_j pi_j).
  double expected_return_probability = 1.0;
  double origin_occupation_ratio = 0.0;
  /// Total variation between pooled occupation and pi_j / K_inf; set for
  /// positive recurrent chains when occupation was tracked.
  std::optional<double> occupation_tv;
  EmpiricalClass evidence = EmpiricalClass::TransientConsistent;

  friend bool operator==(const ReturnStatistics&, const ReturnStatistics&) = default;
};

ReturnStatistics return_statistics(const ChainSpec& chain, const std::vector<EmpiricalReport>& fleet,
                                   const ProbePolicy& policy);

}  // namespace bdperiod
