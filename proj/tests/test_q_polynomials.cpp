#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "bdperiod/q_polynomials.hpp"
#include "common.hpp"

using namespace bdperiod;

namespace {

// max_i |(P^2 y)_i - y_i| / max|y_{i-2..i+2}| over rows 2..N-3, straight
// from p2_row.
double p2_residual(const ChainSpec& c, const std::vector<double>& y) {
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < y.size(); ++i) {
    const auto row = p2_row(c, i);
    double acc = -y[i], scale = 0.0;
    for (int k = 0; k < 5; ++k) {
      acc += row[k] * y[i - 2 + k];
      scale = std::max(scale, std::abs(y[i - 2 + k]));
    }
    worst = std::max(worst, std::abs(acc) / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("Q(1) is the constant vector") {
  for (const auto& nc : bdtest::fleet()) {
    CAPTURE(nc.name);
    const QSequence s = q_eval(nc.chain, 1.0, 1000);
    CHECK_FALSE(s.saturated());
    CHECK(std::all_of(s.values.begin(), s.values.end(), [](double v) { return v == 1.0; }));
    CHECK(eigen_residual(nc.chain, 1.0, 500) == 0.0);
  }
}

TEST_CASE("first values at x = -1") {
  const ChainSpec c = bdtest::period_two();
  const QSequence s = q_eval(c, -1.0, 3);
  CHECK(s.values[0] == 1.0);
  CHECK(s.values[1] == doctest::Approx(-3.0).epsilon(1e-15));
  for (QRoute route : {QRoute::Direct, QRoute::Sum1, QRoute::Sum2}) {
    CAPTURE(to_string(route));
    const QSequence b = qbar_minus_one(c, 2, route);
    REQUIRE(b.values.size() == 3);
    CHECK(b.values[0] == 1.0);
    CHECK(b.values[1] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(b.values[2] == doctest::Approx(3.0 + 6.0 / 7.0).epsilon(1e-14));
  }
  for (const auto& nc : bdtest::fleet()) {
    const Transition t0 = nc.chain.row(0);
    CHECK(qbar_minus_one(nc.chain, 1, QRoute::Direct).values[1] ==
          doctest::Approx((1.0 + t0.r) / t0.p).epsilon(1e-15));
  }
}

TEST_CASE("no self-transitions yet means Qbar stays at 1") {
  const ChainSpec c = ChainSpec::build({{0.0, 0.0, 1.0}, {0.5, 0.0, 0.5}, {0.5, 0.0, 0.5}},
                                       tail::Constant{0.5, 0.4, 0.1});
  for (QRoute route : {QRoute::Direct, QRoute::Sum1, QRoute::Sum2}) {
    const QSequence b = qbar_minus_one(c, 5, route);
    for (std::size_t k = 0; k <= 3; ++k) CHECK(b.values[k] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.values[4] > 1.0);
  }
}

TEST_CASE("routes agree with each other and with the textbook recurrence") {
  for (const auto& nc : bdtest::fleet()) {
    CAPTURE(nc.name);
    const QSequence d = qbar_minus_one(nc.chain, 200, QRoute::Direct);
    const QSequence s1 = qbar_minus_one(nc.chain, 200, QRoute::Sum1);
    const QSequence s2 = qbar_minus_one(nc.chain, 200, QRoute::Sum2);
    CHECK(route_discrepancy(d, s1, 200) <= 1e-10);
    CHECK(route_discrepancy(d, s2, 200) <= 1e-10);
    const auto oracle = bdtest::qbar_oracle(nc.chain, 200);
    for (std::size_t n = 0; n < d.values.size(); ++n) {
      const double o = static_cast<double>(oracle[n]);
      if (!std::isfinite(o)) break;
      CHECK(bdtest::rel_diff(d.values[n], o) < 1e-9);
    }
  }
}

TEST_CASE("Qbar is nondecreasing, at least 1, and below the product bound") {
  ProbePolicy policy;
  policy.horizon = 200;
  for (const auto& nc : bdtest::fleet()) {
    CAPTURE(nc.name);
    const QSequence d = qbar_minus_one(nc.chain, 200, QRoute::Direct);
    for (std::size_t n = 0; n < d.values.size(); ++n) {
      CHECK(d.values[n] >= 1.0);
      if (n > 0) CHECK(d.values[n] >= d.values[n - 1]);
    }
    const auto bound = log_qbar_upper_bound(probe_series(nc.chain, policy));
    for (std::size_t n = 0; n + 1 < d.values.size(); ++n)
      CHECK(std::log(d.values[n + 1]) <= bound[n] + 1e-10);
  }
}

TEST_CASE("growth verdicts") {
  ProbePolicy policy;
  policy.horizon = 5000;
  const GrowthReport d1 = growth_verdict(bdtest::constant_d1(), policy);
  CHECK(d1.overall.diverges());
  CHECK(d1.numeric.diverges());
  CHECK(d1.agreement);

  const GrowthReport d2 = growth_verdict(bdtest::period_two(), policy);
  CHECK(d2.overall.converges());
  CHECK(d2.numeric.outcome == Outcome::Undecided);

  CHECK(growth_verdict(bdtest::null_recurrent(), policy).overall.diverges());
}

TEST_CASE("eigen residual at x = -1") {
  const ChainSpec c = bdtest::period_two();
  const QSequence s = q_eval(c, -1.0, 499);
  REQUIRE_FALSE(s.saturated());
  double mx = 0.0;
  for (double v : s.values) mx = std::max(mx, std::abs(v));
  CHECK(eigen_residual(c, -1.0, 500) <= 1e-12 * mx);

  std::vector<double> bumped = s.values;
  bumped[3] += 1e-6;
  CHECK(eigen_residual(c, -1.0, bumped) >= 1e-7);
}

TEST_CASE("harmonic functions of the two-step chain") {
  for (const auto& nc : bdtest::fleet()) {
    CAPTURE(nc.name);
    HarmonicBasisP2 h;
    try {
      h = harmonic_basis_p2(nc.chain, 60);
    } catch (const Saturated&) {
      continue;
    }
    CHECK(h.residual_ones == 0.0);
    CHECK(h.residual_q_minus1 <= 1e-10);
    CHECK(h.boundary_solution_dim == 2);
    CHECK(h.span_fit_residual <= 1e-8);

    std::vector<double> sum(h.ones.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = h.ones[i] + h.q_minus1[i];
    CHECK(p2_residual(nc.chain, sum) <= 1e-10);
    CHECK(p2_residual(nc.chain, h.q_minus1) <= 1e-10);
  }
}

TEST_CASE("P^2 rows are stochastic") {
  for (const auto& nc : bdtest::fleet()) {
    for (State i = 0; i < 30; ++i) {
      const auto row = p2_row(nc.chain, i);
      double s = 0.0;
      for (double v : row) {
        CHECK(v >= 0.0);
        s += v;
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}
