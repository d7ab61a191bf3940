#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <sstream>

#include "bdperiod/report.hpp"
#include "common.hpp"

using namespace bdperiod;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bdperiod");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(BDPERIOD_DATA_DIR) + "/" + name; }

ProbePolicy policy(std::uint64_t horizon = 5000) {
  ProbePolicy p;
  p.horizon = horizon;
  return p;
}

}  // namespace

TEST_CASE("bundle round trip") {
  CrossValidateOptions opt;
  opt.fleet = 3;
  opt.simulation.steps = 30'000;
  opt.simulation.moduli = {2, 3};
  opt.simulation.track_occupation = true;
  for (const auto& nc : bdtest::fleet()) {
    CAPTURE(nc.name);
    const AnalysisBundle b = cross_validate(nc.chain, policy(), opt);
    const AnalysisBundle back = json::parse(json(b).dump()).get<AnalysisBundle>();
    CHECK(back == b);
    CHECK(json(back).dump() == json(b).dump());
  }
}

TEST_CASE("every verdict in the bundle carries its evidence") {
  const json j = cross_validate(bdtest::period_two(), policy());
  for (const char* key : {"k", "l", "aperiodicity", "prod_p", "rp"}) {
    CAPTURE(key);
    CHECK(j.at("series").at(key).contains("method"));
    CHECK(j.at("series").at(key).contains("horizon_used"));
  }
  CHECK(j.at("version") == std::string(version_string()));
  CHECK(j.at("policy").at("horizon") == 5000);
}

TEST_CASE("cross_validate") {
  const AnalysisBundle d2 = cross_validate(bdtest::period_two(), policy());
  CHECK(d2.period_report.period == Period::Two);
  CHECK(d2.period_report.cross_checks.growth_agreement);
  CHECK(d2.period_report.cross_checks.qbar_route_agreement);

  const AnalysisBundle d1 = cross_validate(bdtest::constant_d1(), policy());
  CHECK(d1.period_report.growth.numeric.diverges());
  CHECK(d1.period_report.growth.analytic.diverges());
  CHECK(d1.period_report.cross_checks.growth_agreement);
}

TEST_CASE("injected fault: negated aperiodicity verdict") {
  CrossValidateOptions opt;
  opt.fault = [](SeriesProbe& p) {
    auto& v = p.verdicts.aperiodicity;
    v.outcome = v.diverges() ? Outcome::Converges : Outcome::Diverges;
  };
  CHECK_THROWS_AS(cross_validate(bdtest::constant_d1(), policy(), opt), ContradictionDetected);
  CHECK_THROWS_AS(cross_validate(bdtest::null_recurrent(), policy(), opt), ContradictionDetected);
  CHECK_THROWS_AS(cross_validate(bdtest::product_positive(), policy(), opt), ContradictionDetected);
}

TEST_CASE("simulated signatures agree with the analytic period") {
  CrossValidateOptions opt;
  opt.fleet = 4;
  opt.simulation.steps = 200'000;
  for (const auto& c : {bdtest::period_two(), bdtest::product_positive(), bdtest::constant_d1()}) {
    const AnalysisBundle b = cross_validate(c, policy(), opt);
    REQUIRE(b.empirical_agreement.has_value());
    CHECK(b.empirical_agreement->agreeing >= 3);
  }
}

TEST_CASE("cli analyze") {
  const CliResult r = cli({"analyze", data("period_two.json")});
  CHECK(r.code == kExitOk);
  const json j = json::parse(r.out);
  CHECK(j.at("period") == 2);
  CHECK(j.at("classification") == "transient");

  const CliResult inf = cli({"analyze", data("product_positive.json")});
  CHECK(inf.code == kExitOk);
  CHECK(json::parse(inf.out).at("period") == "infinite");

  const CliResult ex = cli({"analyze", data("exotic_tail.json")});
  CHECK(ex.code == kExitUndecided);
  CHECK(json::parse(ex.out).at("period") == "undecided");
}

TEST_CASE("cli input errors") {
  const CliResult bad = cli({"validate", data("bad_rowsum.json")});
  CHECK(bad.code == kExitInputError);
  CHECK(bad.err.find("RowSumError") != std::string::npos);
  CHECK(bad.out.empty());

  CHECK(cli({}).code == kExitInputError);
  CHECK(cli({"frobnicate"}).code == kExitInputError);
  CHECK(cli({"analyze"}).code == kExitInputError);
  CHECK(cli({"analyze", data("missing.json")}).code == kExitInputError);
  CHECK(cli({"qpoly", data("period_two.json"), "--route", "sum3"}).code == kExitInputError);
  CHECK(cli({"analyze", data("period_two.json"), "--horizon", "0"}).code == kExitInputError);
}

TEST_CASE("cli validate echoes the normalized chain") {
  const CliResult r = cli({"validate", data("constant_d1.json")});
  CHECK(r.code == kExitOk);
  CHECK(build_chain(json::parse(r.out)) == bdtest::constant_d1());
}

TEST_CASE("cli qpoly") {
  const CliResult r = cli({"qpoly", data("period_two.json"), "--n", "2", "--route", "sum2"});
  CHECK(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::vector<json> rows;
  for (std::string line; std::getline(lines, line);) rows.push_back(json::parse(line));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].at("n") == 1);
  CHECK(rows[1].at("qbar_n").get<double>() == doctest::Approx(3.0));
  CHECK(rows[2].at("qbar_n").get<double>() == doctest::Approx(3.0 + 6.0 / 7.0));

  const CliResult x = cli({"qpoly", data("period_two.json"), "--n", "1", "--x", "-1"});
  CHECK(json::parse(x.out.substr(x.out.find('\n') + 1)).at("q_n").get<double>() == doctest::Approx(-3.0));

  const CliResult sat = cli({"qpoly", data("positive_recurrent.json"), "--n", "5000"});
  CHECK(sat.out.find("saturated_at") != std::string::npos);
}

TEST_CASE("cli simulate is deterministic") {
  const std::vector<std::string> args = {"simulate", data("period_two.json"), "--seed", "42", "--seeds", "3",
                                         "--steps", "50000", "--m", "2", "--m", "4"};
  const CliResult a = cli(args);
  const CliResult b = cli(args);
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  const json j = json::parse(a.out);
  CHECK(j.at("reports").size() == 3);
  CHECK(j.at("reports")[0].at("residue_classes").size() == 2);
  CHECK(j.at("simulation").at("moduli") == json::array({2, 4}));

  const CliResult c = cli({"simulate", data("period_two.json"), "--seed", "43", "--seeds", "3", "--steps", "50000"});
  CHECK(c.out != a.out);
}

TEST_CASE("cli analyze is deterministic and honours the horizon") {
  ::setenv("BDPERIOD_DEFAULT_HORIZON", "3000", 1);
  const CliResult a = cli({"analyze", data("constant_d1.json"), "--seeds", "2", "--steps", "40000"});
  const CliResult b = cli({"analyze", data("constant_d1.json"), "--seeds", "2", "--steps", "40000"});
  ::unsetenv("BDPERIOD_DEFAULT_HORIZON");
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(json::parse(a.out).at("policy").at("horizon") == 3000);

  const CliResult c = cli({"analyze", data("constant_d1.json"), "--horizon", "700", "--pretty"});
  CHECK(json::parse(c.out).at("policy").at("horizon") == 700);
  CHECK(c.out.find("\n  ") != std::string::npos);
}
