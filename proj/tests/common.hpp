#pragma once

// Test chains and brute-force oracles shared by the unit and acceptance
// tests. The oracles use long double and the textbook formulas directly
// on row(i), so they share no code path with the library's log-domain
// summation.

#include <cmath>
#include <string>
#include <vector>

#include "bdperiod/chain_model.hpp"

namespace bdtest {

using bdperiod::ChainSpec;
using bdperiod::Transition;
namespace tail = bdperiod::tail;

inline ChainSpec period_two() { return ChainSpec::build({{0.0, 0.5, 0.5}}, tail::Constant{0.7, 0.3, 0.0}); }
inline ChainSpec product_positive() { return ChainSpec::build({}, tail::ProductPositive{0.25, 0.5}); }
inline ChainSpec constant_d1() { return ChainSpec::build({}, tail::Constant{0.6, 0.3, 0.1}); }
inline ChainSpec positive_recurrent() { return ChainSpec::build({}, tail::Constant{0.3, 0.6, 0.1}); }
inline ChainSpec null_recurrent() { return ChainSpec::build({}, tail::Constant{0.45, 0.45, 0.1}); }
inline ChainSpec exotic() { return ChainSpec::build({}, tail::DriftDecay{0.0, 0.5, 1.0}); }

enum class Expect { One, Two, Infinite, Undecided };

struct NamedChain {
  std::string name;
  ChainSpec chain;
  Expect period;
};

/// Every tail family, every recurrence class and every period.
inline std::vector<NamedChain> fleet() {
  return {
      {"period_two", period_two(), Expect::Two},
      {"product_positive", product_positive(), Expect::Infinite},
      {"constant_d1", constant_d1(), Expect::One},
      {"positive_recurrent", positive_recurrent(), Expect::One},
      {"null_recurrent", null_recurrent(), Expect::One},
      {"geometric_transient", ChainSpec::build({}, tail::GeometricSelf{0.6, 0.4, 0.5, 0.9}), Expect::Two},
      {"geometric_recurrent", ChainSpec::build({}, tail::GeometricSelf{0.4, 0.6, 0.3, 0.5}), Expect::One},
      {"power_summable", ChainSpec::build({}, tail::PowerSelf{0.6, 0.3, 0.1, 2.0}), Expect::Two},
      {"power_heavy", ChainSpec::build({}, tail::PowerSelf{0.6, 0.3, 0.2, 0.5}), Expect::One},
      {"zero_self_transient", ChainSpec::build({{0.0, 0.5, 0.5}}, tail::ZeroSelfTail{0.7, 0.3}), Expect::Two},
      {"zero_self_null", ChainSpec::build({{0.0, 0.2, 0.8}}, tail::ZeroSelfTail{0.5, 0.5}), Expect::One},
      {"product_flat", ChainSpec::build({}, tail::ProductPositive{0.5, 1.0}), Expect::One},
      {"product_slow", ChainSpec::build({}, tail::ProductPositive{0.9, 0.8}), Expect::Infinite},
      {"drift_fast", ChainSpec::build({}, tail::DriftDecay{0.1, 0.5, 2.0}), Expect::One},
      {"drift_slow", ChainSpec::build({{0.0, 0.3, 0.7}}, tail::DriftDecay{0.0, 0.5, 0.5}), Expect::Two},
      {"drift_critical", exotic(), Expect::Undecided},
      {"long_prefix",
       ChainSpec::build({{0.0, 0.2, 0.8}, {0.1, 0.3, 0.6}, {0.4, 0.0, 0.6}, {0.2, 0.1, 0.7}, {0.5, 0.25, 0.25}},
                        tail::Constant{0.55, 0.45, 0.0}),
       Expect::Two},
  };
}

/// pi_0..pi_n by the product formula.
inline std::vector<long double> pi_oracle(const ChainSpec& c, std::size_t n) {
  std::vector<long double> pi(n + 1);
  pi[0] = 1.0L;
  for (std::size_t k = 1; k <= n; ++k)
    pi[k] = pi[k - 1] * static_cast<long double>(c.row(k - 1).p) / static_cast<long double>(c.row(k).q);
  return pi;
}

/// sum_{j<=n} (1/(p_j pi_j)) sum_{k<=j} r_k pi_k
inline long double aperiodicity_oracle(const ChainSpec& c, std::size_t n) {
  const auto pi = pi_oracle(c, n);
  long double inner = 0.0L, total = 0.0L;
  for (std::size_t j = 0; j <= n; ++j) {
    inner += static_cast<long double>(c.row(j).r) * pi[j];
    total += inner / (static_cast<long double>(c.row(j).p) * pi[j]);
  }
  return total;
}

/// (-1)^k Q_k(-1), k = 0..n, from p_k Q_{k+1} = (x - r_k) Q_k - q_k Q_{k-1}.
inline std::vector<long double> qbar_oracle(const ChainSpec& c, std::size_t n) {
  std::vector<long double> q(n + 1);
  const long double x = -1.0L;
  q[0] = 1.0L;
  if (n >= 1) q[1] = (x - c.row(0).r) / c.row(0).p;
  for (std::size_t k = 1; k + 1 <= n; ++k) {
    const Transition t = c.row(k);
    q[k + 1] = ((x - t.r) * q[k] - t.q * q[k - 1]) / t.p;
  }
  for (std::size_t k = 1; k <= n; k += 2) q[k] = -q[k];
  return q;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace bdtest
