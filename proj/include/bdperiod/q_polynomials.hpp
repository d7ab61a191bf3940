#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "bdperiod/chain_model.hpp"
#include "bdperiod/series_analysis.hpp"
#include "bdperiod/verdict.hpp"

namespace bdperiod {

/// |Q_n| beyond this stops the recurrence.
inline constexpr double kQSaturation = 1e300;

class Saturated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Three algebraically equivalent ways of computing (-1)^n Q_n(-1).
enum class QRoute {
  Direct,  ///< three-term recurrence at x = -1 in barred form
  Sum1,    ///< 1 + 2 sum_j (1/(p_j pi_j)) sum_{k<=j} r_k pi_k Qbar_k
  Sum2,    ///< Qbar_n + (2/(p_n pi_n)) sum_{k<=n} r_k pi_k Qbar_k
};
std::string_view to_string(QRoute r);
QRoute qroute_from_string(std::string_view s);

/**
 * Birth-death polynomial values Q_0(x)..Q_N(x) from
 *
 *   x Q_n = q_n Q_{n-1} + r_n Q_n + p_n Q_{n+1},   Q_0 = 1,  p_0 Q_1 = x - r_0.
 *
 * When `barred` is set the values are Qbar_n = (-1)^n Q_n(-1) instead. If
 * the magnitude passes kQSaturation at index n, `values` stops at n - 1 and
 * `saturated_at` holds n.
 */
struct QSequence {
  double x = 1.0;
  bool barred = false;
  std::vector<double> values;
  std::optional<std::uint64_t> saturated_at;

  bool saturated() const { return saturated_at.has_value(); }
};

QSequence q_eval(const ChainSpec& chain, double x, std::uint64_t n_max);

QSequence qbar_minus_one(const ChainSpec& chain, std::uint64_t n_max, QRoute route);

/// Numeric and analytic evidence on lim Qbar_n = infinity.
struct GrowthReport {
  /// Diverges if Qbar passed policy.qbar_threshold or saturated; otherwise
  /// Undecided. Never Converges.
  Verdict numeric;
  /// The aperiodicity verdict, which is equivalent to unbounded growth.
  Verdict analytic;
  /// Numeric when decided, analytic otherwise.
  Verdict overall;
  /// False iff both routes are decided and disagree.
  bool agreement = true;
  friend bool operator==(const GrowthReport&, const GrowthReport&) = default;
};

GrowthReport growth_verdict(const QSequence& qbar, const Verdict& aperiodicity, const ProbePolicy& policy);
GrowthReport growth_verdict(const ChainSpec& chain, const ProbePolicy& policy);

/// Largest relative difference between two routes over their common,
/// unsaturated range (restricted to n <= n_max).
double route_discrepancy(const QSequence& a, const QSequence& b, std::uint64_t n_max);

/// log of prod_{j<=n} (1 + beta_j), beta_j = 2 aperiodicity_term_j, for n = 0..N.
/// Entry n bounds Qbar_{n+1}.
std::vector<double> log_qbar_upper_bound(const SeriesProbe& probe);

/**
 * max over rows 0..N-2 of |(P Q)_i - x Q_i| for the N values given.
 * Row N-1 is the truncation boundary and excluded.
 */
double eigen_residual(const ChainSpec& chain, double x, std::span<const double> q_values);

/// Same, evaluating Q_0..Q_{N-1} first. Throws Saturated. Needs N >= 3.
double eigen_residual(const ChainSpec& chain, double x, std::uint64_t n);

/// The five nonzero entries of row i of P^2, columns i-2..i+2.
std::array<double, 5> p2_row(const ChainSpec& chain, State i);

struct HarmonicBasisP2 {
  std::vector<double> ones;       ///< Q(1) prefix
  std::vector<double> q_minus1;   ///< Q(-1) prefix (signed)
  /// max over interior rows 2..N-3 of |(P^2 y)_i - y_i| / max|y_{i-2..i+2}|
  double residual_ones = 0.0;
  double residual_q_minus1 = 0.0;
  /// Dimension of the seed space (y_0..y_3) that satisfies boundary rows 0
  /// and 1 of P^2 y = y.
  int boundary_solution_dim = 0;
  /// Worst relative least-squares residual of fitting each boundary-valid
  /// solution with span{Q(1), Q(-1)}.
  double span_fit_residual = 0.0;
};

/// Needs N >= 5. Throws Saturated if Q(-1) saturates before N.
HarmonicBasisP2 harmonic_basis_p2(const ChainSpec& chain, std::uint64_t n);

}  // namespace bdperiod
