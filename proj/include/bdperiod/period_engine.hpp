#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdperiod/chain_model.hpp"
#include "bdperiod/q_polynomials.hpp"
#include "bdperiod/series_analysis.hpp"

namespace bdperiod {

/// Asymptotic period of a birth-death chain: only 1, 2 or infinity occur.
enum class Period { One, Two, Infinite, Undecided };
std::string_view to_string(Period p);
Period period_from_string(std::string_view s);

enum class SufficientCondition {
  Recurrent,      ///< recurrent chains are asymptotically aperiodic
  DiagonalBound,  ///< P(i,i) >= delta > 0 for all but finitely many i
  RpSeries,       ///< sum r_j / p_j = infinity
};
std::string_view to_string(SufficientCondition c);
SufficientCondition sufficient_condition_from_string(std::string_view s);

/// One application of "d divides n whenever P^n(i,i) >= delta eventually".
struct DivisorCheck {
  std::uint64_t n = 0;
  bool delta_holds = false;
  bool divides = false;
  friend bool operator==(const DivisorCheck&, const DivisorCheck&) = default;
};

struct CrossChecks {
  bool growth_agreement = true;
  bool qbar_route_agreement = true;
  double qbar_route_discrepancy = 0.0;
  friend bool operator==(const CrossChecks&, const CrossChecks&) = default;
};

struct PeriodReport {
  Classification classification;
  Verdict prod_p_verdict;
  Verdict aperiodicity_verdict;
  Verdict rp_verdict;
  Period period = Period::Undecided;
  std::vector<SufficientCondition> fired_sufficient_conditions;
  std::vector<DivisorCheck> divisor_checks;
  CrossChecks cross_checks;
  GrowthReport growth;

  friend bool operator==(const PeriodReport&, const PeriodReport&) = default;
};

/**
 * Period from the two transition-probability criteria:
 *   prod p_i > 0                                        => infinity
 *   sum_j (1/(p_j pi_j)) sum_{k<=j} r_k pi_k = infinity => 1
 *   otherwise                                           => 2
 * An Undecided verdict that the answer depends on makes the period
 * Undecided. Throws ContradictionDetected if any consistency invariant is
 * violated.
 */
PeriodReport asymptotic_period(const ChainSpec& chain, const ProbePolicy& policy);

/// Same, from precomputed pieces (used by cross_validate and fault-injection
/// tests).
PeriodReport assemble_period_report(const ChainSpec& chain, const SeriesProbe& probe,
                                    const QSequence& qbar_direct, const CrossChecks& routes,
                                    const ProbePolicy& policy);

/// Period from the prod_p and aperiodicity verdicts alone.
Period period_from(const Verdict& prod_p, const Verdict& aperiodicity);

/// Conditions evaluated independently of the prod_p / aperiodicity criteria.
std::vector<SufficientCondition> sufficient_checks(const ChainSpec& chain,
                                                   const SeriesProbe& probe);
std::vector<SufficientCondition> sufficient_checks(const ChainSpec& chain,
                                                   const ProbePolicy& policy);

/// Whether the reported period divides n. If delta_holds (the caller
/// established P^n(i,i) >= delta for all but finitely many i) and it does
/// not, throws ContradictionDetected. Infinite never divides, 1 always
/// does; Undecided is reported as dividing (nothing to contradict).
bool divisor_check(const PeriodReport& report, std::uint64_t n, bool delta_holds);

/// Throws ContradictionDetected if the report violates any of the
/// period invariants (trichotomy consistency, recurrence => 1,
/// sufficient condition => 1, exclusivity of prod_p > 0 and aperiodicity = inf).
void check_invariants(const PeriodReport& report);

}  // namespace bdperiod
