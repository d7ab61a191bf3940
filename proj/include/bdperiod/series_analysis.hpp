#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bdperiod/chain_model.hpp"
#include "bdperiod/verdict.hpp"

namespace bdperiod {

/// Truncation and threshold settings shared by every analysis.
struct ProbePolicy {
  std::uint64_t horizon = 100000;
  /// Numeric fallback: a partial sum past this is declared divergent.
  double divergence_threshold = 1e8;
  /// Numeric fallback for the growth of (-1)^n Q_n(-1).
  double qbar_threshold = 1e12;
  /// Q-bar routes are compared up to this index.
  std::uint64_t route_check_n = 200;

  /// Defaults, with the horizon taken from BDPERIOD_DEFAULT_HORIZON if set.
  static ProbePolicy from_env();

  friend bool operator==(const ProbePolicy&, const ProbePolicy&) = default;
};

/// Linear-domain partial sums saturate here instead of overflowing.
inline constexpr double kSaturation = 1e300;

enum class SeriesKind { K, L, Aperiodicity, ProdP, Rp };
std::string_view to_string(SeriesKind k);

struct SeriesVerdicts {
  Verdict k;
  Verdict l;
  Verdict aperiodicity;
  /// Diverges means prod p_i = 0; Converges means prod p_i > 0.
  Verdict prod_p;
  Verdict rp;
};

/**
 * Partial sums of every series the period criteria rest on, for
 * n = 0..horizon.
 *
 *   K_n    = sum_{j<=n} pi_j
 *   L_n    = sum_{j<=n} 1/(p_j pi_j)
 *   A_n    = sum _{j<=n} (1/(p_j pi_j)) sum_{k<=j} r_k pi_k
 *   rp_n   = sum_{j<=n} r_j/p_j
 *
 * with pi_0 = 1 and pi_n = (p_0...p_{n-1})/(q_1...q_n).
 */
struct SeriesProbe {
  std::uint64_t horizon = 0;
  std::vector<double> log_pi;
  std::vector<double> k_partial;
  std::vector<double> l_partial;
  std::vector<double> aperiodicity_partial;
  /// Individual aperiodicity terms; twice these are the beta_j of the Q-bar bound.
  std::vector<double> aperiodicity_terms;
  std::vector<double> log_prod_p_partial;
  std::vector<double> rp_partial;
  SeriesVerdicts verdicts;

  double final_partial(SeriesKind kind) const;
};

enum class RecurrenceClass { PositiveRecurrent, NullRecurrent, Transient, Undecided };
std::string_view to_string(RecurrenceClass c);
RecurrenceClass recurrence_class_from_string(std::string_view s);

struct Classification {
  RecurrenceClass kind = RecurrenceClass::Undecided;
  Verdict k;
  Verdict l;

  bool recurrent() const {
    return kind == RecurrenceClass::PositiveRecurrent || kind == RecurrenceClass::NullRecurrent;
  }
  friend bool operator==(const Classification&, const Classification&) = default;
};

/// log pi_0 .. log pi_N by cumulative sums of log p_{n-1} - log q_n.
std::vector<double> potential_coefficients(const ChainSpec& chain, std::uint64_t horizon);

/// All partial sums and verdicts up to policy.horizon.
SeriesProbe probe_series(const ChainSpec& chain, const ProbePolicy& policy);

/// aperiodicity partial sums S_0..S_N. The inner sum is carried relative to pi_j in
/// a rebased (mantissa, log-scale) pair.
std::vector<double> aperiodicity_series(const ChainSpec& chain, std::uint64_t horizon);

struct ProductReport {
  std::vector<double> log_partial;
  Verdict verdict;
};

/// sum_{i<=N} log p_i and the verdict on prod p_i > 0.
ProductReport log_product_p(const ChainSpec& chain, std::uint64_t horizon,
                            const ProbePolicy& policy = {});

/// Closed-form verdict for (family, kind), if the rule table has one.
std::optional<Outcome> analytic_rule(const TailFamily& tail, SeriesKind kind);

/// Analytic rule when one applies; otherwise the numeric fallback, which
/// can only ever say Diverges or Undecided. For ProdP the partial is
/// sum log p_i and "exceeds the threshold" means falls below -threshold.
Verdict decide_series(const TailFamily& tail, SeriesKind kind, double partial,
                      std::uint64_t horizon, const ProbePolicy& policy);

/// Positive/null recurrent or transient from the K and L verdicts.
/// Throws ContradictionDetected if both converge.
Classification classify_from(const Verdict& k, const Verdict& l);
Classification classify(const ChainSpec& chain, const ProbePolicy& policy);

/// Whether inf_i r_i > 0 over the tail, decided per family.
bool tail_self_bounded_below(const TailFamily& tail);

/// Whether inf_i P^2(i,i) > 0 over the tail, decided per family.
bool tail_two_step_return_bounded_below(const TailFamily& tail);

}  // namespace bdperiod
