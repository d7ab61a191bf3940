#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "bdperiod/simulator.hpp"
#include "common.hpp"

using namespace bdperiod;

TEST_CASE("generator reference values") {
  std::uint64_t s = 0;
  CHECK(splitmix64(s) == 0xE220A8397B1DCDAFULL);

  auto g = Xoshiro256::from_state({1, 2, 3, 4});
  CHECK(g.next() == 11520ULL);
  CHECK(g.next() == 0ULL);
  CHECK(g.next() == 1509978240ULL);
  CHECK(g.next() == 1215971899390074240ULL);

  Xoshiro256 h(42);
  CHECK(h.next() == 1546998764402558742ULL);
  CHECK(h.next() == 6990951692964543102ULL);

  CHECK(fleet_seeds(7, 3) ==
        std::vector<std::uint64_t>{7191089600892374487ULL, 309689372594955804ULL, 16616101746815609346ULL});
}

TEST_CASE("fixed seed gives a fixed path") {
  // Reference path from an independent implementation of the same
  // generator and step rule.
  const std::vector<State> expected = {0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 8, 9, 9, 10, 11, 12, 13, 14, 15};
  const RowTable rows(bdtest::constant_d1(), 40);
  for (int run = 0; run < 2; ++run) {
    std::vector<State> path = {0};
    simulate(rows, 42, 0, 20, [&](std::uint64_t, State, State to) { path.push_back(to); });
    CHECK(path == expected);
  }
}

TEST_CASE("jumps are bounded by one and states stay nonnegative") {
  for (const auto& nc : bdtest::fleet()) {
    CAPTURE(nc.name);
    const RowTable rows(nc.chain, 20'001);
    std::uint64_t bad = 0;
    simulate(rows, 3, 0, 20'000, [&](std::uint64_t, State from, State to) {
      const State d = to > from ? to - from : from - to;
      if (d > 1) ++bad;
    });
    CHECK(bad == 0);
  }
}

TEST_CASE("right-move frequency is binomial") {
  const ChainSpec c = ChainSpec::build({}, tail::Constant{0.999, 0.0005, 0.0005});
  const std::uint64_t n = 200'000;
  const RowTable rows(c, n + 1);
  std::uint64_t right = 0;
  simulate(rows, 11, 0, n, [&](std::uint64_t, State from, State to) { right += to == from + 1; });
  const double p = c.row(5).p;
  const double sd = std::sqrt(n * p * (1 - p));
  CHECK(std::abs(static_cast<double>(right) - n * p) <= 3 * sd);
}

TEST_CASE("detect_period signatures") {
  CHECK(detect_period(std::nullopt, std::nullopt, false, 100) == EmpiricalPeriod::InfiniteSignature);
  CHECK(detect_period(50, 40, true, 100) == EmpiricalPeriod::InfiniteSignature);
  CHECK(detect_period(500, 40, true, 100) == EmpiricalPeriod::Two);
  CHECK(detect_period(500, 400, true, 100) == EmpiricalPeriod::One);
  CHECK(detect_period(500, 400, false, 100) == EmpiricalPeriod::Inconclusive);
}

TEST_CASE("residue estimator") {
  CHECK(estimate_residue_classes(4, {100, 0, 0, 0}).classes == 4u);
  CHECK(estimate_residue_classes(4, {50, 0, 50, 0}).classes == 2u);
  CHECK(estimate_residue_classes(4, {25, 25, 25, 25}).classes == 1u);
  CHECK(estimate_residue_classes(6, {40, 0, 30, 0, 30, 0}).classes == 2u);
  CHECK(estimate_residue_classes(6, {50, 0, 0, 50, 0, 0}).classes == 3u);
  CHECK_FALSE(estimate_residue_classes(4, {5, 0, 0, 0}).classes.has_value());
  CHECK(estimate_residue_classes(2, {96, 4}).classes == 2u);
  CHECK(estimate_residue_classes(2, {94, 6}).classes == 1u);
}

TEST_CASE("report invariants on short runs") {
  SimulationConfig cfg;
  cfg.steps = 60'000;
  cfg.burn_in = 10'000;
  cfg.moduli = {2, 3, 4, 6};
  for (const auto& nc : bdtest::fleet()) {
    CAPTURE(nc.name);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      cfg.seed = seed;
      const EmpiricalReport r = run_trajectory(nc.chain, cfg);
      REQUIRE(r.parity_lock_step.has_value());
      CHECK(*r.parity_lock_step <= r.steps);
      if (r.last_nonright_step) CHECK(*r.parity_lock_step <= *r.last_nonright_step + 1);
      else CHECK(*r.parity_lock_step == 0);
      for (const auto& est : r.residue_classes)
        if (est.classes) CHECK(est.m % *est.classes == 0);
      CHECK(r.tail_window.size() == kDefaultWindow);
      CHECK(r.tail_window.back() == r.final_state);
    }
  }
}

TEST_CASE("burn-in defaults and preconditions") {
  CHECK(default_burn_in(1'000'000) == 10'000);
  CHECK(default_burn_in(100'000'000) == 1'000'000);
  SimulationConfig cfg;
  cfg.steps = 5'000;
  CHECK_THROWS(run_trajectory(bdtest::period_two(), cfg));
  cfg.burn_in = 100;
  CHECK_NOTHROW(run_trajectory(bdtest::period_two(), cfg));
}

TEST_CASE("OpenMP fleet equals the serial reference") {
  SimulationConfig cfg;
  cfg.steps = 50'000;
  cfg.moduli = {2, 3};
  cfg.track_occupation = true;
  const auto seeds = fleet_seeds(99, 8);
  for (const auto& c : {bdtest::period_two(), bdtest::positive_recurrent()}) {
    const auto a = run_fleet(c, cfg, seeds);
    const auto b = run_fleet_serial(c, cfg, seeds);
    CHECK(a == b);
    CHECK(a == run_fleet(c, cfg, seeds));
  }
}

TEST_CASE("return statistics") {
  SimulationConfig cfg;
  cfg.steps = 200'000;
  cfg.track_occupation = true;
  ProbePolicy policy;
  policy.horizon = 5000;

  const auto pr = return_statistics(bdtest::positive_recurrent(),
                                    run_fleet(bdtest::positive_recurrent(), cfg, fleet_seeds(1, 4)), policy);
  CHECK(pr.return_fraction == 1.0);
  REQUIRE(pr.occupation_tv.has_value());
  CHECK(*pr.occupation_tv <= 0.05);
  CHECK(pr.evidence == EmpiricalClass::PositiveRecurrentConsistent);

  const auto d2 = return_statistics(bdtest::period_two(), run_fleet(bdtest::period_two(), cfg, fleet_seeds(1, 4)), policy);
  // 1 - 1/L_inf with L_inf = 7/2
  CHECK(d2.expected_return_probability == doctest::Approx(5.0 / 7.0).epsilon(1e-12));
  CHECK_FALSE(d2.occupation_tv.has_value());

  const ChainSpec sym = ChainSpec::build({{0.0, 0.5, 0.5}}, tail::Constant{0.5, 0.5, 0.0});
  cfg.steps = 1'000'000;
  cfg.track_occupation = false;
  const auto nr = return_statistics(sym, run_fleet(sym, cfg, fleet_seeds(5, 8)), policy);
  CHECK(nr.return_fraction == 1.0);
  CHECK(nr.evidence == EmpiricalClass::NullRecurrentConsistent);
}
