#include <cmath>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "bdperiod/report.hpp"

namespace bdperiod {

using nlohmann::json;

namespace {

struct Options {
  std::string chain_path;
  std::optional<std::uint64_t> horizon;
  std::optional<double> div_threshold;
  bool pretty = false;

  std::uint64_t seed = 0;
  std::uint64_t seeds = 0;
  std::uint64_t steps = 1'000'000;
  std::optional<std::uint64_t> burn_in;
  std::vector<std::uint32_t> moduli;
  State x0 = 0;
  bool occupation = false;

  std::uint64_t n = 20;
  std::string route = "direct";
  std::optional<double> x;
};

ProbePolicy policy_from(const Options& o) {
  ProbePolicy p = ProbePolicy::from_env();
  if (o.horizon) p.horizon = *o.horizon;
  if (o.div_threshold) p.divergence_threshold = *o.div_threshold;
  return p;
}

SimulationConfig simulation_from(const Options& o) {
  SimulationConfig c;
  c.seed = o.seed;
  c.x0 = o.x0;
  c.steps = o.steps;
  c.burn_in = o.burn_in;
  c.moduli = o.moduli;
  c.track_occupation = o.occupation;
  return c;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("chain", o.chain_path, "chain-spec JSON file")->required();
  cmd->add_flag("--pretty", o.pretty, "indented JSON");
}

void add_policy(CLI::App* cmd, Options& o) {
  cmd->add_option("--horizon", o.horizon, "truncation horizon N")->check(CLI::PositiveNumber);
  cmd->add_option("--div-threshold", o.div_threshold, "numeric divergence threshold")
      ->check(CLI::PositiveNumber);
}

void add_simulation(CLI::App* cmd, Options& o, std::uint64_t default_fleet) {
  o.seeds = default_fleet;
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--seeds", o.seeds, "fleet size");
  cmd->add_option("--steps", o.steps, "steps per trajectory")->check(CLI::PositiveNumber);
  cmd->add_option("--burn-in", o.burn_in, "burn-in steps");
  cmd->add_option("--m", o.moduli, "residue modulus (repeatable, or comma separated)")
      ->delimiter(',')
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->check(CLI::PositiveNumber);
  cmd->add_option("--x0", o.x0, "start state");
}

int analyze(const Options& o, std::ostream& out) {
  const ChainSpec chain = load_chain(o.chain_path);
  CrossValidateOptions cv;
  cv.fleet = o.seeds;
  cv.simulation = simulation_from(o);
  const AnalysisBundle b = cross_validate(chain, policy_from(o), cv);
  out << dump(json(b), o.pretty) << '\n';
  const auto& r = b.period_report;
  const bool undecided =
      r.period == Period::Undecided || r.classification.kind == RecurrenceClass::Undecided;
  return undecided ? kExitUndecided : kExitOk;
}

int simulate(const Options& o, std::ostream& out) {
  const ChainSpec chain = load_chain(o.chain_path);
  const SimulationConfig c = simulation_from(o);
  const auto fleet = run_fleet(chain, c, fleet_seeds(c.seed, o.seeds));
  json doc = {{"version", version_string()},
              {"chain", chain_to_json(chain)},
              {"simulation",
               {{"seed", c.seed},
                {"fleet", o.seeds},
                {"x0", c.x0},
                {"steps", c.steps},
                {"burn_in", c.effective_burn_in()},
                {"moduli", c.moduli}}},
              {"reports", fleet},
              {"return_statistics", return_statistics(chain, fleet, policy_from(o))}};
  out << dump(doc, o.pretty) << '\n';
  return kExitOk;
}

int qpoly(const Options& o, std::ostream& out) {
  const ChainSpec chain = load_chain(o.chain_path);
  QSequence seq;
  const char* key = "qbar_n";
  if (o.x) {
    seq = q_eval(chain, *o.x, o.n);
    key = "q_n";
  } else {
    seq = qbar_minus_one(chain, o.n, qroute_from_string(o.route));
  }
  for (std::size_t n = 0; n < seq.values.size(); ++n)
    out << json{{"n", n}, {key, seq.values[n]}}.dump() << '\n';
  if (seq.saturated_at) out << json{{"saturated_at", *seq.saturated_at}}.dump() << '\n';
  return kExitOk;
}

int validate(const Options& o, std::ostream& out) {
  out << dump(chain_to_json(load_chain(o.chain_path)), o.pretty) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asymptotic period and recurrence of birth-death chains", "bdperiod"};
  app.set_version_flag("--version", std::string(version_string()));
  app.require_subcommand(1);
  Options o;

  auto* an = app.add_subcommand("analyze", "period, classification and cross-checks");
  add_common(an, o);
  add_policy(an, o);
  add_simulation(an, o, 0);

  Options so;
  auto* sim = app.add_subcommand("simulate", "seeded trajectories and empirical signatures");
  add_common(sim, so);
  add_policy(sim, so);
  add_simulation(sim, so, 1);
  sim->add_flag("--occupation", so.occupation, "record per-state occupation counts");

  Options qo;
  auto* qp = app.add_subcommand("qpoly", "Q_n values as JSON lines");
  qp->add_option("chain", qo.chain_path, "chain-spec JSON file")->required();
  qp->add_option("--n", qo.n, "largest index");
  qp->add_option("--route", qo.route, "direct, sum1 or sum2 for (-1)^n Q_n(-1)")
      ->check(CLI::IsMember({"direct", "sum1", "sum2"}));
  qp->add_option("--x", qo.x, "evaluate Q_n(x) instead");

  Options vo;
  auto* va = app.add_subcommand("validate", "parse and normalize a chain spec");
  add_common(va, vo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version_string() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (an->parsed()) return analyze(o, out);
    if (sim->parsed()) return simulate(so, out);
    if (qp->parsed()) return qpoly(qo, out);
    if (va->parsed()) return validate(vo, out);
  } catch (const ContradictionDetected& e) {
    err << "ContradictionDetected: " << e.what() << '\n';
    return kExitContradiction;
  } catch (const ChainError& e) {
    err << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace bdperiod
