#include "bdperiod/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifndef BDPERIOD_VERSION
#define BDPERIOD_VERSION "0.0.0"
#endif

namespace bdperiod {

using nlohmann::json;

std::string_view version_string() { return "bdperiod " BDPERIOD_VERSION; }

namespace {

// Non-finite doubles have no JSON literal; they travel as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw std::invalid_argument("not a number: " + s);
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const Verdict& v) {
  j = json{{"outcome", to_string(v.outcome)},
           {"method", to_string(v.method)},
           {"horizon_used", v.horizon_used},
           {"partial_value", number(v.partial_value)}};
}

void from_json(const json& j, Verdict& v) {
  v.outcome = outcome_from_string(j.at("outcome").get<std::string>());
  v.method = method_from_string(j.at("method").get<std::string>());
  v.horizon_used = j.at("horizon_used").get<std::uint64_t>();
  v.partial_value = number_from(j.at("partial_value"));
}

void to_json(json& j, const ProbePolicy& p) {
  j = json{{"horizon", p.horizon},
           {"divergence_threshold", p.divergence_threshold},
           {"qbar_threshold", p.qbar_threshold},
           {"route_check_n", p.route_check_n}};
}

void from_json(const json& j, ProbePolicy& p) {
  p.horizon = j.at("horizon").get<std::uint64_t>();
  p.divergence_threshold = j.at("divergence_threshold").get<double>();
  p.qbar_threshold = j.at("qbar_threshold").get<double>();
  p.route_check_n = j.at("route_check_n").get<std::uint64_t>();
}

void to_json(json& j, const Classification& c) {
  j = json{{"kind", to_string(c.kind)}, {"k", c.k}, {"l", c.l}};
}

void from_json(const json& j, Classification& c) {
  c.kind = recurrence_class_from_string(j.at("kind").get<std::string>());
  c.k = j.at("k").get<Verdict>();
  c.l = j.at("l").get<Verdict>();
}

json period_to_json(Period p) {
  switch (p) {
    case Period::One: return 1;
    case Period::Two: return 2;
    default: return std::string(to_string(p));
  }
}

Period period_from_json(const json& j) {
  if (j.is_number_integer()) return period_from_string(std::to_string(j.get<int>()));
  return period_from_string(j.get<std::string>());
}

void to_json(json& j, const PeriodReport& r) {
  json fired = json::array();
  for (auto c : r.fired_sufficient_conditions) fired.push_back(to_string(c));
  json divisors = json::array();
  for (const auto& d : r.divisor_checks)
    divisors.push_back({{"n", d.n}, {"delta_holds", d.delta_holds}, {"divides", d.divides}});
  j = json{{"period", period_to_json(r.period)},
           {"classification", r.classification},
           {"prod_p_verdict", r.prod_p_verdict},
           {"aperiodicity_verdict", r.aperiodicity_verdict},
           {"rp_verdict", r.rp_verdict},
           {"fired_sufficient_conditions", fired},
           {"divisor_checks", divisors},
           {"cross_checks",
            {{"growth_agreement", r.cross_checks.growth_agreement},
             {"qbar_route_agreement", r.cross_checks.qbar_route_agreement},
             {"qbar_route_discrepancy", number(r.cross_checks.qbar_route_discrepancy)}}},
           {"growth",
            {{"numeric", r.growth.numeric},
             {"analytic", r.growth.analytic},
             {"overall", r.growth.overall},
             {"agreement", r.growth.agreement}}}};
}

void from_json(const json& j, PeriodReport& r) {
  r.period = period_from_json(j.at("period"));
  r.classification = j.at("classification").get<Classification>();
  r.prod_p_verdict = j.at("prod_p_verdict").get<Verdict>();
  r.aperiodicity_verdict = j.at("aperiodicity_verdict").get<Verdict>();
  r.rp_verdict = j.at("rp_verdict").get<Verdict>();
  r.fired_sufficient_conditions.clear();
  for (const auto& c : j.at("fired_sufficient_conditions"))
    r.fired_sufficient_conditions.push_back(sufficient_condition_from_string(c.get<std::string>()));
  r.divisor_checks.clear();
  for (const auto& d : j.at("divisor_checks"))
    r.divisor_checks.push_back({d.at("n").get<std::uint64_t>(), d.at("delta_holds").get<bool>(),
                                d.at("divides").get<bool>()});
  const auto& cc = j.at("cross_checks");
  r.cross_checks.growth_agreement = cc.at("growth_agreement").get<bool>();
  r.cross_checks.qbar_route_agreement = cc.at("qbar_route_agreement").get<bool>();
  r.cross_checks.qbar_route_discrepancy = number_from(cc.at("qbar_route_discrepancy"));
  const auto& g = j.at("growth");
  r.growth.numeric = g.at("numeric").get<Verdict>();
  r.growth.analytic = g.at("analytic").get<Verdict>();
  r.growth.overall = g.at("overall").get<Verdict>();
  r.growth.agreement = g.at("agreement").get<bool>();
}

void to_json(json& j, const ResidueEstimate& r) {
  j = json{{"m", r.m},
           {"key_counts", r.key_counts},
           {"samples", r.samples},
           {"classes", optional_json(r.classes)},
           {"concentration", r.concentration}};
}

void from_json(const json& j, ResidueEstimate& r) {
  r.m = j.at("m").get<std::uint32_t>();
  r.key_counts = j.at("key_counts").get<std::vector<std::uint64_t>>();
  r.samples = j.at("samples").get<std::uint64_t>();
  r.classes = optional_from<std::uint32_t>(j, "classes");
  r.concentration = j.at("concentration").get<double>();
}

void to_json(json& j, const EmpiricalReport& r) {
  j = json{{"seed", r.seed},
           {"x0", r.x0},
           {"steps", r.steps},
           {"burn_in", r.burn_in},
           {"final_state", r.final_state},
           {"max_state", r.max_state},
           {"right_moves", r.right_moves},
           {"last_nonright_step", optional_json(r.last_nonright_step)},
           {"last_self_step", optional_json(r.last_self_step)},
           {"parity_lock_step", optional_json(r.parity_lock_step)},
           {"residue_classes", r.residue_classes},
           {"returns_to_origin",
            {{"count", r.returns_to_origin.count},
             {"last_index", optional_json(r.returns_to_origin.last_index)}}},
           {"period_estimate", to_string(r.period_estimate)},
           {"origin_visits_first_half", r.origin_visits_first_half},
           {"origin_visits_second_half", r.origin_visits_second_half},
           {"occupation", r.occupation},
           {"tail_window", r.tail_window}};
}

void from_json(const json& j, EmpiricalReport& r) {
  r.seed = j.at("seed").get<std::uint64_t>();
  r.x0 = j.at("x0").get<State>();
  r.steps = j.at("steps").get<std::uint64_t>();
  r.burn_in = j.at("burn_in").get<std::uint64_t>();
  r.final_state = j.at("final_state").get<State>();
  r.max_state = j.at("max_state").get<State>();
  r.right_moves = j.at("right_moves").get<std::uint64_t>();
  r.last_nonright_step = optional_from<std::uint64_t>(j, "last_nonright_step");
  r.last_self_step = optional_from<std::uint64_t>(j, "last_self_step");
  r.parity_lock_step = optional_from<std::uint64_t>(j, "parity_lock_step");
  r.residue_classes = j.at("residue_classes").get<std::vector<ResidueEstimate>>();
  const auto& ret = j.at("returns_to_origin");
  r.returns_to_origin.count = ret.at("count").get<std::uint64_t>();
  r.returns_to_origin.last_index = optional_from<std::uint64_t>(ret, "last_index");
  r.period_estimate = empirical_period_from_string(j.at("period_estimate").get<std::string>());
  r.origin_visits_first_half = j.at("origin_visits_first_half").get<std::uint64_t>();
  r.origin_visits_second_half = j.at("origin_visits_second_half").get<std::uint64_t>();
  r.occupation = j.at("occupation").get<std::vector<std::uint64_t>>();
  r.tail_window = j.at("tail_window").get<std::vector<State>>();
}

void to_json(json& j, const ReturnStatistics& s) {
  j = json{{"runs", s.runs},
           {"returned_runs", s.returned_runs},
           {"return_fraction", s.return_fraction},
           {"expected_return_probability", number(s.expected_return_probability)},
           {"origin_occupation_ratio", s.origin_occupation_ratio},
           {"occupation_tv", optional_json(s.occupation_tv)},
           {"evidence", to_string(s.evidence)}};
}

void from_json(const json& j, ReturnStatistics& s) {
  s.runs = j.at("runs").get<std::size_t>();
  s.returned_runs = j.at("returned_runs").get<std::size_t>();
  s.return_fraction = j.at("return_fraction").get<double>();
  s.expected_return_probability = number_from(j.at("expected_return_probability"));
  s.origin_occupation_ratio = j.at("origin_occupation_ratio").get<double>();
  s.occupation_tv = optional_from<double>(j, "occupation_tv");
  s.evidence = empirical_class_from_string(j.at("evidence").get<std::string>());
}

void to_json(json& j, const AnalysisBundle& b) {
  json series = {{"horizon", b.series.horizon},
                 {"k", b.series.k},
                 {"l", b.series.l},
                 {"aperiodicity", b.series.aperiodicity},
                 {"prod_p", b.series.prod_p},
                 {"rp", b.series.rp}};
  json qbar = {{"n", b.qbar.n},
               {"qbar_n", number(b.qbar.qbar_n)},
               {"saturated_at", optional_json(b.qbar.saturated_at)},
               {"verdict", b.qbar.verdict}};
  j = json{{"version", b.version},
           {"policy", b.policy},
           {"chain", b.chain},
           {"period", period_to_json(b.period_report.period)},
           {"classification", to_string(b.period_report.classification.kind)},
           {"period_report", b.period_report},
           {"qbar", qbar},
           {"series", series}};
  if (b.simulation) {
    const auto& s = *b.simulation;
    j["simulation"] = {{"seed", s.seed},   {"fleet", s.fleet},     {"x0", s.x0},
                       {"steps", s.steps}, {"burn_in", s.burn_in}, {"moduli", s.moduli}};
  }
  if (!b.empirical.empty()) j["empirical"] = b.empirical;
  if (b.return_statistics) j["return_statistics"] = *b.return_statistics;
  if (b.empirical_agreement) {
    const auto& a = *b.empirical_agreement;
    j["empirical_agreement"] = {
        {"runs", a.runs}, {"agreeing", a.agreeing}, {"inconclusive", a.inconclusive}};
  }
}

void from_json(const json& j, AnalysisBundle& b) {
  b.version = j.at("version").get<std::string>();
  b.policy = j.at("policy").get<ProbePolicy>();
  b.chain = j.at("chain");
  b.period_report = j.at("period_report").get<PeriodReport>();
  const auto& q = j.at("qbar");
  b.qbar.n = q.at("n").get<std::uint64_t>();
  b.qbar.qbar_n = number_from(q.at("qbar_n"));
  b.qbar.saturated_at = optional_from<std::uint64_t>(q, "saturated_at");
  b.qbar.verdict = q.at("verdict").get<Verdict>();
  const auto& s = j.at("series");
  b.series.horizon = s.at("horizon").get<std::uint64_t>();
  b.series.k = s.at("k").get<Verdict>();
  b.series.l = s.at("l").get<Verdict>();
  b.series.aperiodicity = s.at("aperiodicity").get<Verdict>();
  b.series.prod_p = s.at("prod_p").get<Verdict>();
  b.series.rp = s.at("rp").get<Verdict>();
  b.simulation.reset();
  if (j.contains("simulation")) {
    const auto& e = j.at("simulation");
    b.simulation = SimulationEcho{e.at("seed").get<std::uint64_t>(),
                                  e.at("fleet").get<std::uint64_t>(),
                                  e.at("x0").get<State>(),
                                  e.at("steps").get<std::uint64_t>(),
                                  e.at("burn_in").get<std::uint64_t>(),
                                  e.at("moduli").get<std::vector<std::uint32_t>>()};
  }
  b.empirical = j.contains("empirical") ? j.at("empirical").get<std::vector<EmpiricalReport>>()
                                        : std::vector<EmpiricalReport>{};
  b.return_statistics.reset();
  if (j.contains("return_statistics"))
    b.return_statistics = j.at("return_statistics").get<ReturnStatistics>();
  b.empirical_agreement.reset();
  if (j.contains("empirical_agreement")) {
    const auto& a = j.at("empirical_agreement");
    b.empirical_agreement = EmpiricalAgreement{a.at("runs").get<std::size_t>(),
                                               a.at("agreeing").get<std::size_t>(),
                                               a.at("inconclusive").get<std::size_t>()};
  }
}

std::string dump(const json& j, bool pretty) { return pretty ? j.dump(2) : j.dump(); }

bool matches(Period analytic, EmpiricalPeriod empirical) {
  switch (analytic) {
    case Period::One: return empirical == EmpiricalPeriod::One;
    case Period::Two: return empirical == EmpiricalPeriod::Two;
    case Period::Infinite: return empirical == EmpiricalPeriod::InfiniteSignature;
    case Period::Undecided: return false;
  }
  return false;
}

namespace {

constexpr double kRouteTolerance = 1e-10;

}  // namespace

AnalysisBundle cross_validate(const ChainSpec& chain, const ProbePolicy& policy,
                              const CrossValidateOptions& options) {
  SeriesProbe probe = probe_series(chain, policy);
  if (options.fault) options.fault(probe);

  const QSequence direct = qbar_minus_one(chain, policy.horizon, QRoute::Direct);
  const std::uint64_t check_n = std::min(policy.route_check_n, policy.horizon);
  const QSequence sum1 = qbar_minus_one(chain, check_n, QRoute::Sum1);
  const QSequence sum2 = qbar_minus_one(chain, check_n, QRoute::Sum2);
  CrossChecks routes;
  routes.qbar_route_discrepancy =
      std::max(route_discrepancy(direct, sum1, check_n), route_discrepancy(direct, sum2, check_n));
  routes.qbar_route_agreement = routes.qbar_route_discrepancy <= kRouteTolerance;
  if (!routes.qbar_route_agreement)
    throw ContradictionDetected("Qbar routes disagree: relative discrepancy " +
                                std::to_string(routes.qbar_route_discrepancy));

  AnalysisBundle b;
  b.version = std::string(version_string());
  b.policy = policy;
  b.chain = chain_to_json(chain);
  b.period_report = assemble_period_report(chain, probe, direct, routes, policy);
  b.qbar.n = direct.values.empty() ? 0 : direct.values.size() - 1;
  b.qbar.qbar_n = direct.values.empty() ? 0.0 : direct.values.back();
  b.qbar.saturated_at = direct.saturated_at;
  b.qbar.verdict = b.period_report.growth.overall;
  b.series = {probe.horizon,       probe.verdicts.k,      probe.verdicts.l,
              probe.verdicts.aperiodicity, probe.verdicts.prod_p, probe.verdicts.rp};

  if (options.fleet > 0) {
    const SimulationConfig& c = options.simulation;
    b.simulation = SimulationEcho{c.seed, options.fleet, c.x0, c.steps, c.effective_burn_in(),
                                  c.moduli};
    b.empirical = run_fleet(chain, c, fleet_seeds(c.seed, options.fleet));
    b.return_statistics = return_statistics(chain, b.empirical, policy);
    EmpiricalAgreement a;
    a.runs = b.empirical.size();
    for (const auto& r : b.empirical) {
      if (r.period_estimate == EmpiricalPeriod::Inconclusive) ++a.inconclusive;
      if (matches(b.period_report.period, r.period_estimate)) ++a.agreeing;
    }
    b.empirical_agreement = a;
  }
  return b;
}

}  // namespace bdperiod
