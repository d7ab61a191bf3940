#include "bdperiod/series_analysis.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "bdperiod/scaled_sum.hpp"

namespace bdperiod {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double saturating_add(double acc, double term) {
  const double s = acc + term;
  return s < kSaturation ? s : kSaturation;
}

// Asymptotic recurrence regime of a tail family, from the limiting ratio
// p_i / q_{i+1}. Unknown where the family has no closed-form rule.
enum class Regime { Transient, PositiveRecurrent, NullRecurrent, Unknown };

// Normalization (p := 1 - (q + r)) can leave a symmetric family a few ulps
// off balance, so rates this close count as equal.
Regime compare_rates(double p, double q) {
  if (std::abs(p - q) <= kRowSumTolerance * std::max(p, q)) return Regime::NullRecurrent;
  return p > q ? Regime::Transient : Regime::PositiveRecurrent;
}

Regime regime(const TailFamily& tail) {
  return std::visit(
      overloaded{
          [](const tail::Constant& t) { return compare_rates(t.p, t.q); },
          [](const tail::ZeroSelfTail& t) { return compare_rates(t.p, t.q); },
          // r_i telescopes out of pi_n: pi_n ~ (p/q)^n (1 - r_n0)/(1 - r_n).
          [](const tail::GeometricSelf& t) { return compare_rates(t.p, t.q); },
          [](const tail::PowerSelf& t) { return compare_rates(t.p, t.q); },
          [](const tail::ProductPositive& t) {
            if (t.rho < 1.0) return Regime::Transient;
            return compare_rates(1.0 - t.c, 0.5 * t.c);
          },
          [](const tail::DriftDecay& t) {
            // log pi_n ~ 2a sum (i+1)^-alpha: bounded for alpha > 1,
            // +-infinity faster than log n for alpha < 1.
            if (t.a == 0.0 || t.alpha > 1.0) return Regime::NullRecurrent;
            if (t.alpha < 1.0) return t.a > 0.0 ? Regime::Transient : Regime::PositiveRecurrent;
            return Regime::Unknown;
          },
      },
      tail);
}

// Whether sum_i r_i diverges over the tail (p_i is bounded away from zero
// for every family, so this is the rp verdict).
bool self_mass_diverges(const TailFamily& tail) {
  return std::visit(overloaded{
                        [](const tail::Constant& t) { return t.r > 0.0; },
                        [](const tail::ZeroSelfTail&) { return false; },
                        [](const tail::GeometricSelf& t) { return t.c > 0.0 && t.rho == 1.0; },
                        [](const tail::PowerSelf& t) { return t.c > 0.0 && t.alpha <= 1.0; },
                        [](const tail::ProductPositive& t) { return t.rho == 1.0; },
                        [](const tail::DriftDecay& t) { return t.r > 0.0; },
                    },
                    tail);
}

}  // namespace

std::string_view to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::K: return "K";
    case SeriesKind::L: return "L";
    case SeriesKind::Aperiodicity: return "aperiodicity";
    case SeriesKind::ProdP: return "prod_p";
    case SeriesKind::Rp: return "rp";
  }
  return "K";
}

std::string_view to_string(RecurrenceClass c) {
  switch (c) {
    case RecurrenceClass::PositiveRecurrent: return "positive_recurrent";
    case RecurrenceClass::NullRecurrent: return "null_recurrent";
    case RecurrenceClass::Transient: return "transient";
    case RecurrenceClass::Undecided: return "undecided";
  }
  return "undecided";
}

RecurrenceClass recurrence_class_from_string(std::string_view s) {
  if (s == "positive_recurrent") return RecurrenceClass::PositiveRecurrent;
  if (s == "null_recurrent") return RecurrenceClass::NullRecurrent;
  if (s == "transient") return RecurrenceClass::Transient;
  if (s == "undecided") return RecurrenceClass::Undecided;
  throw std::invalid_argument("unknown classification: " + std::string(s));
}

ProbePolicy ProbePolicy::from_env() {
  ProbePolicy policy;
  if (const char* env = std::getenv("BDPERIOD_DEFAULT_HORIZON")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
      throw std::invalid_argument("BDPERIOD_DEFAULT_HORIZON must be a positive integer");
    policy.horizon = v;
  }
  return policy;
}

double SeriesProbe::final_partial(SeriesKind kind) const {
  switch (kind) {
    case SeriesKind::K: return k_partial.back();
    case SeriesKind::L: return l_partial.back();
    case SeriesKind::Aperiodicity: return aperiodicity_partial.back();
    case SeriesKind::ProdP: return log_prod_p_partial.back();
    case SeriesKind::Rp: return rp_partial.back();
  }
  return 0.0;
}

std::vector<double> potential_coefficients(const ChainSpec& chain, std::uint64_t horizon) {
  std::vector<double> log_pi(horizon + 1);
  log_pi[0] = 0.0;
  double prev_log_p = chain.log_row(0).log_p;
  for (State n = 1; n <= horizon; ++n) {
    const LogTransition lt = chain.log_row(n);
    log_pi[n] = log_pi[n - 1] + (prev_log_p - lt.log_q);
    prev_log_p = lt.log_p;
  }
  return log_pi;
}

namespace {

// Inner sum of aperiodicity relative to pi_j:  s_j = sum_{k<=j} r_k pi_k / pi_j,
// advanced by s_j = s_{j-1} q_j / p_{j-1} + r_j.
class RelativeInnerSum {
 public:
  void advance(const LogTransition& prev, const LogTransition& cur, double r) {
    sum_.scale(std::exp(cur.log_q - prev.log_p));
    sum_.add(r);
  }
  void start(double r0) { sum_.add(r0); }
  /// s_j / p_j, overflowing to +inf.
  double term(double log_p) const { return sum_.value_times_exp(-log_p); }

 private:
  ScaledSum sum_;
};

}  // namespace

std::vector<double> aperiodicity_series(const ChainSpec& chain, std::uint64_t horizon) {
  std::vector<double> partial(horizon + 1);
  RelativeInnerSum inner;
  LogTransition prev = chain.log_row(0);
  inner.start(chain.row(0).r);
  double acc = saturating_add(0.0, inner.term(prev.log_p));
  partial[0] = acc;
  for (State j = 1; j <= horizon; ++j) {
    const LogTransition cur = chain.log_row(j);
    inner.advance(prev, cur, chain.row(j).r);
    acc = saturating_add(acc, inner.term(cur.log_p));
    partial[j] = acc;
    prev = cur;
  }
  return partial;
}

ProductReport log_product_p(const ChainSpec& chain, std::uint64_t horizon,
                            const ProbePolicy& policy) {
  ProductReport out;
  out.log_partial.resize(horizon + 1);
  double acc = 0.0;
  for (State i = 0; i <= horizon; ++i) {
    acc += chain.log_row(i).log_p;
    out.log_partial[i] = acc;
  }
  out.verdict = decide_series(chain.tail(), SeriesKind::ProdP, acc, horizon, policy);
  return out;
}

SeriesProbe probe_series(const ChainSpec& chain, const ProbePolicy& policy) {
  const std::uint64_t n_max = policy.horizon;
  SeriesProbe probe;
  probe.horizon = n_max;
  probe.log_pi = potential_coefficients(chain, n_max);
  probe.k_partial.resize(n_max + 1);
  probe.l_partial.resize(n_max + 1);
  probe.aperiodicity_partial.resize(n_max + 1);
  probe.aperiodicity_terms.resize(n_max + 1);
  probe.log_prod_p_partial.resize(n_max + 1);
  probe.rp_partial.resize(n_max + 1);

  double k = 0.0, l = 0.0, bd = 0.0, lp = 0.0, rp = 0.0;
  RelativeInnerSum inner;
  LogTransition prev{};
  for (State j = 0; j <= n_max; ++j) {
    const Transition t = chain.row(j);
    const LogTransition lt = chain.log_row(j);
    const double log_pi = probe.log_pi[j];

    k = saturating_add(k, std::exp(log_pi));
    l = saturating_add(l, std::exp(-log_pi - lt.log_p));
    if (j == 0)
      inner.start(t.r);
    else
      inner.advance(prev, lt, t.r);
    const double term = inner.term(lt.log_p);
    probe.aperiodicity_terms[j] = term < kSaturation ? term : kSaturation;
    bd = saturating_add(bd, term);
    lp += lt.log_p;
    rp = saturating_add(rp, t.r / t.p);

    probe.k_partial[j] = k;
    probe.l_partial[j] = l;
    probe.aperiodicity_partial[j] = bd;
    probe.log_prod_p_partial[j] = lp;
    probe.rp_partial[j] = rp;
    prev = lt;
  }

  const auto& tail = chain.tail();
  probe.verdicts.k = decide_series(tail, SeriesKind::K, k, n_max, policy);
  probe.verdicts.l = decide_series(tail, SeriesKind::L, l, n_max, policy);
  probe.verdicts.aperiodicity = decide_series(tail, SeriesKind::Aperiodicity, bd, n_max, policy);
  probe.verdicts.prod_p = decide_series(tail, SeriesKind::ProdP, lp, n_max, policy);
  probe.verdicts.rp = decide_series(tail, SeriesKind::Rp, rp, n_max, policy);
  return probe;
}

std::optional<Outcome> analytic_rule(const TailFamily& tail, SeriesKind kind) {
  const Regime reg = regime(tail);
  switch (kind) {
    case SeriesKind::K:
      if (reg == Regime::Unknown) return std::nullopt;
      return reg == Regime::PositiveRecurrent ? Outcome::Converges : Outcome::Diverges;
    case SeriesKind::L:
      if (reg == Regime::Unknown) return std::nullopt;
      return reg == Regime::Transient ? Outcome::Converges : Outcome::Diverges;
    case SeriesKind::ProdP: {
      // sup p_i < 1 for every family except ProductPositive with rho < 1,
      // where sum c rho^i < infinity.
      const auto* pp = std::get_if<tail::ProductPositive>(&tail);
      return (pp && pp->rho < 1.0) ? Outcome::Converges : Outcome::Diverges;
    }
    case SeriesKind::Rp:
      return self_mass_diverges(tail) ? Outcome::Diverges : Outcome::Converges;
    case SeriesKind::Aperiodicity:
      // Term j is at least r_j/p_j.
      if (self_mass_diverges(tail)) return Outcome::Diverges;
      if (reg == Regime::Unknown) return std::nullopt;
      // Recurrent: L diverges and the inner sum is eventually >= some r_k pi_k > 0.
      if (reg != Regime::Transient) return Outcome::Diverges;
      // Transient with summable r_i: pi_k/pi_j decays at least geometrically
      // in j - k, so the double sum is bounded by (sum r_k) times a
      // convergent geometric factor, or by (finite inner sum) * L when the
      // tail has no self-transitions.
      return Outcome::Converges;
  }
  return std::nullopt;
}

Verdict decide_series(const TailFamily& tail, SeriesKind kind, double partial,
                      std::uint64_t horizon, const ProbePolicy& policy) {
  Verdict v;
  v.horizon_used = horizon;
  v.partial_value = partial;
  if (const auto rule = analytic_rule(tail, kind)) {
    v.outcome = *rule;
    v.method = Method::Analytic;
    return v;
  }
  v.method = Method::NumericThreshold;
  const bool past = kind == SeriesKind::ProdP ? partial < -policy.divergence_threshold
                                              : partial > policy.divergence_threshold;
  v.outcome = past ? Outcome::Diverges : Outcome::Undecided;
  return v;
}

Classification classify_from(const Verdict& k, const Verdict& l) {
  Classification c{RecurrenceClass::Undecided, k, l};
  if (k.converges() && l.converges())
    throw ContradictionDetected("K and L both converge, but K + L must diverge");
  if (!k.decided() || !l.decided()) return c;
  if (k.converges())
    c.kind = RecurrenceClass::PositiveRecurrent;
  else if (l.converges())
    c.kind = RecurrenceClass::Transient;
  else
    c.kind = RecurrenceClass::NullRecurrent;
  return c;
}

Classification classify(const ChainSpec& chain, const ProbePolicy& policy) {
  const SeriesProbe probe = probe_series(chain, policy);
  return classify_from(probe.verdicts.k, probe.verdicts.l);
}

bool tail_self_bounded_below(const TailFamily& tail) {
  return std::visit(overloaded{
                        [](const tail::Constant& t) { return t.r > 0.0; },
                        [](const tail::ZeroSelfTail&) { return false; },
                        [](const tail::GeometricSelf& t) { return t.c > 0.0 && t.rho == 1.0; },
                        [](const tail::PowerSelf& t) { return t.c > 0.0 && t.alpha == 0.0; },
                        [](const tail::ProductPositive& t) { return t.rho == 1.0; },
                        [](const tail::DriftDecay& t) { return t.r > 0.0; },
                    },
                    tail);
}

bool tail_two_step_return_bounded_below(const TailFamily& tail) {
  // P^2(i,i) >= p_i q_{i+1}; only a vanishing q_i can break the bound.
  if (const auto* pp = std::get_if<tail::ProductPositive>(&tail)) return pp->rho == 1.0;
  return true;
}

}  // namespace bdperiod
