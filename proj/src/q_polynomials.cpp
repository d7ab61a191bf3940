#include "bdperiod/q_polynomials.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "bdperiod/scaled_sum.hpp"

namespace bdperiod {

std::string_view to_string(QRoute r) {
  switch (r) {
    case QRoute::Direct: return "direct";
    case QRoute::Sum1: return "sum1";
    case QRoute::Sum2: return "sum2";
  }
  return "direct";
}

QRoute qroute_from_string(std::string_view s) {
  if (s == "direct") return QRoute::Direct;
  if (s == "sum1") return QRoute::Sum1;
  if (s == "sum2") return QRoute::Sum2;
  throw std::invalid_argument("unknown route \"" + std::string(s) + "\" (direct|sum1|sum2)");
}

namespace {

bool over(double v) { return !(std::abs(v) <= kQSaturation); }

}  // namespace

QSequence q_eval(const ChainSpec& chain, double x, std::uint64_t n_max) {
  QSequence seq;
  seq.x = x;
  seq.values.reserve(n_max + 1);
  seq.values.push_back(1.0);
  // Difference form of the recurrence, using q_n + r_n + p_n = 1:
  //   p_n (Q_{n+1} - Q_n) = (x - 1) Q_n + q_n (Q_n - Q_{n-1}).
  // At x = 1 every increment is exactly zero.
  double prev = 0.0;
  double cur = 1.0;
  for (State n = 0; n < n_max; ++n) {
    const Transition t = chain.row(n);
    const double next = cur + ((x - 1.0) * cur + t.q * (cur - prev)) / t.p;
    if (over(next)) {
      seq.saturated_at = n + 1;
      break;
    }
    seq.values.push_back(next);
    prev = cur;
    cur = next;
  }
  return seq;
}

namespace {

QSequence qbar_direct(const ChainSpec& chain, std::uint64_t n_max) {
  // The recurrence at x = -1 in terms of Qbar_n = (-1)^n Q_n(-1):
  //   p_n Qbar_{n+1} = (1 + r_n) Qbar_n - q_n Qbar_{n-1},
  // rewritten for the increments D_n = Qbar_n - Qbar_{n-1}:
  //   D_{n+1} = (q_n D_n + 2 r_n Qbar_n) / p_n.
  // Every term is nonnegative, so the computed sequence is monotone too.
  QSequence seq;
  seq.x = -1.0;
  seq.barred = true;
  seq.values.reserve(n_max + 1);
  seq.values.push_back(1.0);
  double cur = 1.0;
  double diff = 0.0;
  for (State n = 0; n < n_max; ++n) {
    const Transition t = chain.row(n);
    diff = (t.q * diff + 2.0 * t.r * cur) / t.p;
    const double next = cur + diff;
    if (over(next)) {
      seq.saturated_at = n + 1;
      break;
    }
    seq.values.push_back(next);
    cur = next;
  }
  return seq;
}

// Inner sum carried relative to pi_j: s_j = sum_{k<=j} r_k pi_k Qbar_k / pi_j.
QSequence qbar_sum1(const ChainSpec& chain, std::uint64_t n_max) {
  QSequence seq;
  seq.x = -1.0;
  seq.barred = true;
  seq.values.reserve(n_max + 1);
  seq.values.push_back(1.0);
  ScaledSum inner;
  double outer = 0.0;
  LogTransition prev{};
  for (State n = 0; n < n_max; ++n) {
    const LogTransition lt = chain.log_row(n);
    if (n > 0) inner.scale(std::exp(lt.log_q - prev.log_p));
    inner.add_log(lt.log_r + std::log(seq.values[n]));
    outer += inner.value_times_exp(-lt.log_p);
    const double next = 1.0 + 2.0 * outer;
    if (over(next)) {
      seq.saturated_at = n + 1;
      break;
    }
    seq.values.push_back(next);
    prev = lt;
  }
  return seq;
}

// Inner sum sum_{k<=n} r_k pi_k Qbar_k kept in absolute log scale.
QSequence qbar_sum2(const ChainSpec& chain, std::uint64_t n_max) {
  QSequence seq;
  seq.x = -1.0;
  seq.barred = true;
  seq.values.reserve(n_max + 1);
  seq.values.push_back(1.0);
  const std::vector<double> log_pi = potential_coefficients(chain, n_max);
  ScaledSum inner;
  for (State n = 0; n < n_max; ++n) {
    const LogTransition lt = chain.log_row(n);
    inner.add_log(lt.log_r + log_pi[n] + std::log(seq.values[n]));
    const double next = seq.values[n] + 2.0 * inner.value_times_exp(-log_pi[n] - lt.log_p);
    if (over(next)) {
      seq.saturated_at = n + 1;
      break;
    }
    seq.values.push_back(next);
  }
  return seq;
}

}  // namespace

QSequence qbar_minus_one(const ChainSpec& chain, std::uint64_t n_max, QRoute route) {
  switch (route) {
    case QRoute::Direct: return qbar_direct(chain, n_max);
    case QRoute::Sum1: return qbar_sum1(chain, n_max);
    case QRoute::Sum2: return qbar_sum2(chain, n_max);
  }
  return qbar_direct(chain, n_max);
}

GrowthReport growth_verdict(const QSequence& qbar, const Verdict& aperiodicity, const ProbePolicy& policy) {
  GrowthReport g;
  g.numeric.method = Method::NumericThreshold;
  g.numeric.horizon_used = qbar.values.size() - 1;
  g.numeric.partial_value = qbar.values.back();
  if (qbar.saturated()) {
    g.numeric.outcome = Outcome::Diverges;
    g.numeric.horizon_used = *qbar.saturated_at;
    g.numeric.partial_value = kQSaturation;
  } else if (qbar.values.back() > policy.qbar_threshold) {
    g.numeric.outcome = Outcome::Diverges;
  }
  g.analytic = aperiodicity;
  g.overall = g.numeric.decided() ? g.numeric : g.analytic;
  g.agreement = !(g.numeric.decided() && g.analytic.decided() &&
                  g.numeric.outcome != g.analytic.outcome);
  return g;
}

GrowthReport growth_verdict(const ChainSpec& chain, const ProbePolicy& policy) {
  const SeriesProbe probe = probe_series(chain, policy);
  const QSequence qbar = qbar_minus_one(chain, policy.horizon, QRoute::Direct);
  return growth_verdict(qbar, probe.verdicts.aperiodicity, policy);
}

double route_discrepancy(const QSequence& a, const QSequence& b, std::uint64_t n_max) {
  const std::size_t n = std::min<std::size_t>({a.values.size(), b.values.size(), n_max + 1});
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = std::max(std::abs(a.values[i]), std::abs(b.values[i]));
    if (scale > 0.0) worst = std::max(worst, std::abs(a.values[i] - b.values[i]) / scale);
  }
  return worst;
}

std::vector<double> log_qbar_upper_bound(const SeriesProbe& probe) {
  std::vector<double> out(probe.aperiodicity_terms.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    acc += std::log1p(2.0 * probe.aperiodicity_terms[j]);
    out[j] = acc;
  }
  return out;
}

double eigen_residual(const ChainSpec& chain, double x, std::span<const double> q) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    const Transition t = chain.row(i);
    const double left = i == 0 ? 0.0 : t.q * q[i - 1];
    const double pq = (left + t.r * q[i]) + t.p * q[i + 1];
    worst = std::max(worst, std::abs(pq - x * q[i]));
  }
  return worst;
}

double eigen_residual(const ChainSpec& chain, double x, std::uint64_t n) {
  if (n < 3) throw std::invalid_argument("eigen_residual needs N >= 3");
  const QSequence seq = q_eval(chain, x, n - 1);
  if (seq.saturated())
    throw Saturated("Q_n(" + std::to_string(x) + ") saturated at n = " +
                    std::to_string(*seq.saturated_at));
  return eigen_residual(chain, x, seq.values);
}

std::array<double, 5> p2_row(const ChainSpec& chain, State i) {
  const Transition cur = chain.row(i);
  const Transition next = chain.row(i + 1);
  const Transition prev = i == 0 ? Transition{} : chain.row(i - 1);
  return {
      cur.q * prev.q,
      cur.q * (prev.r + cur.r),
      cur.q * prev.p + cur.r * cur.r + cur.p * next.q,
      cur.p * (cur.r + next.r),
      cur.p * next.p,
  };
}

namespace {

// (P^2 y)_i - y_i, scaled by the largest |y| in the stencil.
double p2_row_residual(const std::array<double, 5>& a, std::span<const double> y, std::size_t i) {
  // sum_k a_k (y_k - y_i): the row sums to one, and in this form a
  // constant y gives exactly zero.
  double acc = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < 5; ++k) {
    if (i + k < 2) continue;
    const double v = y[i + k - 2];
    acc += a[k] * (v - y[i]);
    scale = std::max(scale, std::abs(v));
  }
  const double res = std::abs(acc);
  return scale > 0.0 ? res / scale : res;
}

double interior_residual(const ChainSpec& chain, std::span<const double> y) {
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < y.size(); ++i)
    worst = std::max(worst, p2_row_residual(p2_row(chain, i), y, i));
  return worst;
}

// Extends y_0..y_3 to y_0..y_{N-1} by solving the interior rows of P^2 y = y
// for y_{i+2}.
std::vector<double> extend_interior(const ChainSpec& chain, std::array<double, 4> seed,
                                    std::size_t n) {
  std::vector<double> y(seed.begin(), seed.end());
  y.resize(n);
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const auto a = p2_row(chain, i);
    const double rest = a[0] * y[i - 2] + a[1] * y[i - 1] + (a[2] - 1.0) * y[i] + a[3] * y[i + 1];
    y[i + 2] = -rest / a[4];
  }
  return y;
}

// Least-squares fit of y by alpha*u + beta*v with rows weighted by
// 1/max(|u_i|, |v_i|, |y_i|). Returns the worst weighted residual.
double span_fit(std::span<const double> y, std::span<const double> u, std::span<const double> v) {
  double uu = 0, uv = 0, vv = 0, uy = 0, vy = 0;
  std::vector<double> w(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double s = std::max({std::abs(u[i]), std::abs(v[i]), std::abs(y[i]), 1e-300});
    w[i] = 1.0 / s;
    const double a = u[i] * w[i], b = v[i] * w[i], c = y[i] * w[i];
    uu += a * a;
    uv += a * b;
    vv += b * b;
    uy += a * c;
    vy += b * c;
  }
  const double det = uu * vv - uv * uv;
  const double alpha = (uy * vv - vy * uv) / det;
  const double beta = (uu * vy - uv * uy) / det;
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    worst = std::max(worst, std::abs(y[i] - alpha * u[i] - beta * v[i]) * w[i]);
  return worst;
}

}  // namespace

HarmonicBasisP2 harmonic_basis_p2(const ChainSpec& chain, std::uint64_t n) {
  if (n < 5) throw std::invalid_argument("harmonic_basis_p2 needs N >= 5");
  HarmonicBasisP2 out;
  const QSequence ones = q_eval(chain, 1.0, n - 1);
  const QSequence minus = q_eval(chain, -1.0, n - 1);
  if (minus.saturated())
    throw Saturated("Q_n(-1) saturated at n = " + std::to_string(*minus.saturated_at));
  out.ones = ones.values;
  out.q_minus1 = minus.values;
  out.residual_ones = interior_residual(chain, out.ones);
  out.residual_q_minus1 = interior_residual(chain, out.q_minus1);

  // Boundary rows 0 and 1 of (P^2 - I) y = 0 touch only y_0..y_3, and their
  // last coefficients p_0 p_1 and p_1 p_2 are nonzero, so y_0 and y_1 fix
  // y_2 and y_3. The boundary-valid seed space is therefore spanned by the
  // two solutions below; any third seed direction violates row 0 or row 1.
  const auto r0 = p2_row(chain, 0);
  const auto r1 = p2_row(chain, 1);
  out.boundary_solution_dim = 4 - ((r0[4] != 0.0) + (r1[4] != 0.0));

  const std::size_t len = std::min<std::size_t>(n, 64);
  const std::span<const double> u(out.ones.data(), len);
  const std::span<const double> v(out.q_minus1.data(), len);
  for (const auto& [y0, y1] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}}) {
    const double y2 = -((r0[2] - 1.0) * y0 + r0[3] * y1) / r0[4];
    const double y3 = -(r1[1] * y0 + (r1[2] - 1.0) * y1 + r1[3] * y2) / r1[4];
    const auto y = extend_interior(chain, {y0, y1, y2, y3}, len);
    out.span_fit_residual = std::max(out.span_fit_residual, span_fit(y, u, v));
  }
  return out;
}

}  // namespace bdperiod
