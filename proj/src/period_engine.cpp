#include "bdperiod/period_engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace bdperiod {

std::string_view to_string(Period p) {
  switch (p) {
    case Period::One: return "1";
    case Period::Two: return "2";
    case Period::Infinite: return "infinite";
    case Period::Undecided: return "undecided";
  }
  return "undecided";
}

Period period_from_string(std::string_view s) {
  if (s == "1") return Period::One;
  if (s == "2") return Period::Two;
  if (s == "infinite") return Period::Infinite;
  if (s == "undecided") return Period::Undecided;
  throw std::invalid_argument("unknown period: " + std::string(s));
}

std::string_view to_string(SufficientCondition c) {
  switch (c) {
    case SufficientCondition::Recurrent: return "recurrent";
    case SufficientCondition::DiagonalBound: return "diagonal_bound";
    case SufficientCondition::RpSeries: return "rp_series";
  }
  return "recurrent";
}

SufficientCondition sufficient_condition_from_string(std::string_view s) {
  if (s == "recurrent") return SufficientCondition::Recurrent;
  if (s == "diagonal_bound") return SufficientCondition::DiagonalBound;
  if (s == "rp_series") return SufficientCondition::RpSeries;
  throw std::invalid_argument("unknown sufficient condition: " + std::string(s));
}

Period period_from(const Verdict& prod_p, const Verdict& aperiodicity) {
  if (prod_p.converges()) return Period::Infinite;
  if (aperiodicity.diverges()) return Period::One;
  if (prod_p.diverges() && aperiodicity.converges()) return Period::Two;
  return Period::Undecided;
}

std::vector<SufficientCondition> sufficient_checks(const ChainSpec& chain,
                                                   const SeriesProbe& probe) {
  std::vector<SufficientCondition> fired;
  if (classify_from(probe.verdicts.k, probe.verdicts.l).recurrent())
    fired.push_back(SufficientCondition::Recurrent);
  if (tail_self_bounded_below(chain.tail())) fired.push_back(SufficientCondition::DiagonalBound);
  if (probe.verdicts.rp.diverges()) fired.push_back(SufficientCondition::RpSeries);
  return fired;
}

std::vector<SufficientCondition> sufficient_checks(const ChainSpec& chain,
                                                   const ProbePolicy& policy) {
  return sufficient_checks(chain, probe_series(chain, policy));
}

bool divisor_check(const PeriodReport& report, std::uint64_t n, bool delta_holds) {
  bool divides = true;
  switch (report.period) {
    case Period::One: divides = true; break;
    case Period::Two: divides = n % 2 == 0; break;
    case Period::Infinite: divides = false; break;
    case Period::Undecided: divides = true; break;
  }
  if (delta_holds && !divides)
    throw ContradictionDetected("period " + std::string(to_string(report.period)) +
                                " must divide " + std::to_string(n) +
                                " because P^n(i,i) is eventually bounded below");
  return divides;
}

void check_invariants(const PeriodReport& r) {
  auto fail = [](const std::string& what) { throw ContradictionDetected(what); };
  if (r.prod_p_verdict.converges() && r.aperiodicity_verdict.diverges())
    fail("prod p_i > 0 and the aperiodicity series diverges at the same time");
  if (r.period != period_from(r.prod_p_verdict, r.aperiodicity_verdict))
    fail("period does not follow from the prod_p and aperiodicity verdicts");
  if (r.classification.recurrent() && r.aperiodicity_verdict.converges())
    fail("recurrent chain with a convergent aperiodicity series");
  if (r.period != Period::Undecided && r.period != Period::One) {
    if (r.classification.recurrent()) fail("recurrent chain with period > 1");
    if (!r.fired_sufficient_conditions.empty())
      fail("a sufficient condition for aperiodicity fired but period > 1");
  }
  if (!r.cross_checks.growth_agreement)
    fail("growth of (-1)^n Q_n(-1) disagrees with the aperiodicity series");
}

PeriodReport assemble_period_report(const ChainSpec& chain, const SeriesProbe& probe,
                                    const QSequence& qbar_direct, const CrossChecks& routes,
                                    const ProbePolicy& policy) {
  PeriodReport r;
  r.classification = classify_from(probe.verdicts.k, probe.verdicts.l);
  r.prod_p_verdict = probe.verdicts.prod_p;
  r.aperiodicity_verdict = probe.verdicts.aperiodicity;
  r.rp_verdict = probe.verdicts.rp;
  r.period = period_from(r.prod_p_verdict, r.aperiodicity_verdict);
  r.fired_sufficient_conditions = sufficient_checks(chain, probe);
  r.growth = growth_verdict(qbar_direct, r.aperiodicity_verdict, policy);
  r.cross_checks = routes;
  r.cross_checks.growth_agreement = r.growth.agreement;

  const bool diag = std::find(r.fired_sufficient_conditions.begin(),
                              r.fired_sufficient_conditions.end(),
                              SufficientCondition::DiagonalBound) !=
                    r.fired_sufficient_conditions.end();
  const bool two_step = tail_two_step_return_bounded_below(chain.tail());
  r.divisor_checks.push_back({1, diag, divisor_check(r, 1, diag)});
  r.divisor_checks.push_back({2, two_step, divisor_check(r, 2, two_step)});

  check_invariants(r);
  return r;
}

namespace {

// Relative tolerance for the three Qbar routes.
constexpr double kRouteTolerance = 1e-10;

}  // namespace

PeriodReport asymptotic_period(const ChainSpec& chain, const ProbePolicy& policy) {
  // The prod_p criterion is the cheapest and fails fast, but the report
  // carries every verdict, so the full probe is computed regardless.
  const SeriesProbe probe = probe_series(chain, policy);
  const QSequence direct = qbar_minus_one(chain, policy.horizon, QRoute::Direct);
  const std::uint64_t check_n = std::min(policy.route_check_n, policy.horizon);
  const QSequence sum1 = qbar_minus_one(chain, check_n, QRoute::Sum1);
  const QSequence sum2 = qbar_minus_one(chain, check_n, QRoute::Sum2);
  CrossChecks routes;
  routes.qbar_route_discrepancy =
      std::max(route_discrepancy(direct, sum1, check_n), route_discrepancy(direct, sum2, check_n));
  routes.qbar_route_agreement = routes.qbar_route_discrepancy <= kRouteTolerance;
  return assemble_period_report(chain, probe, direct, routes, policy);
}

}  // namespace bdperiod
