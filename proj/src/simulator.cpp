#include "bdperiod/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>

namespace bdperiod {

std::uint64_t default_burn_in(std::uint64_t steps) {
  return std::max<std::uint64_t>(10'000, steps / 100);
}

RowTable::RowTable(const ChainSpec& chain, State max_state)
    : left_(max_state + 1), stay_(max_state + 1) {
  for (State i = 0; i <= max_state; ++i) {
    const Transition t = chain.row(i);
    left_[i] = t.q;
    stay_[i] = t.q + t.r;
  }
}

std::string_view to_string(EmpiricalPeriod p) {
  switch (p) {
    case EmpiricalPeriod::One: return "1";
    case EmpiricalPeriod::Two: return "2";
    case EmpiricalPeriod::InfiniteSignature: return "infinite_signature";
    case EmpiricalPeriod::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

EmpiricalPeriod empirical_period_from_string(std::string_view s) {
  if (s == "1") return EmpiricalPeriod::One;
  if (s == "2") return EmpiricalPeriod::Two;
  if (s == "infinite_signature") return EmpiricalPeriod::InfiniteSignature;
  if (s == "inconclusive") return EmpiricalPeriod::Inconclusive;
  throw std::invalid_argument("unknown empirical period: " + std::string(s));
}

std::string_view to_string(EmpiricalClass c) {
  switch (c) {
    case EmpiricalClass::TransientConsistent: return "transient_consistent";
    case EmpiricalClass::NullRecurrentConsistent: return "null_recurrent_consistent";
    case EmpiricalClass::PositiveRecurrentConsistent: return "positive_recurrent_consistent";
  }
  return "transient_consistent";
}

EmpiricalClass empirical_class_from_string(std::string_view s) {
  if (s == "transient_consistent") return EmpiricalClass::TransientConsistent;
  if (s == "null_recurrent_consistent") return EmpiricalClass::NullRecurrentConsistent;
  if (s == "positive_recurrent_consistent") return EmpiricalClass::PositiveRecurrentConsistent;
  throw std::invalid_argument("unknown empirical class: " + std::string(s));
}

ResidueEstimate estimate_residue_classes(std::uint32_t m, std::vector<std::uint64_t> key_counts) {
  if (m == 0) throw std::invalid_argument("residue modulus must be >= 1");
  if (key_counts.size() != m) throw std::invalid_argument("residue key_counts must have size m");
  ResidueEstimate est;
  est.m = m;
  est.key_counts = std::move(key_counts);
  for (auto c : est.key_counts) est.samples += c;
  if (est.samples < kResidueMinSamples) return est;

  for (std::uint32_t b = m; b >= 1; --b) {
    if (m % b != 0) continue;
    std::uint64_t best = 0;
    for (std::uint32_t a = 0; a < b; ++a) {
      std::uint64_t in_coset = 0;
      for (std::uint32_t k = a; k < m; k += b) in_coset += est.key_counts[k];
      best = std::max(best, in_coset);
    }
    const double share = static_cast<double>(best) / static_cast<double>(est.samples);
    if (share >= kResidueConcentration) {
      est.classes = b;
      est.concentration = share;
      return est;
    }
  }
  return est;  // unreachable: b = 1 always holds every key
}

EmpiricalPeriod detect_period(std::optional<std::uint64_t> last_nonright_step,
                              std::optional<std::uint64_t> last_self_step,
                              bool even_time_parities_mixed, std::uint64_t burn_in) {
  auto before = [&](const std::optional<std::uint64_t>& s) { return !s || *s < burn_in; };
  if (before(last_nonright_step)) return EmpiricalPeriod::InfiniteSignature;
  if (before(last_self_step)) return EmpiricalPeriod::Two;
  if (even_time_parities_mixed) return EmpiricalPeriod::One;
  return EmpiricalPeriod::Inconclusive;
}

namespace {

struct Detectors {
  explicit Detectors(const SimulationConfig& c)
      : x0(c.x0), steps(c.steps), burn_in(c.effective_burn_in()), half(c.steps / 2),
        window(c.window), track_occupation(c.track_occupation), ring(c.window) {
    for (auto m : c.moduli) {
      if (m == 0) throw std::invalid_argument("residue modulus must be >= 1");
      keys.emplace_back(m, 0);
    }
  }

  void operator()(std::uint64_t n, State from, State to) {
#ifdef BDPERIOD_CHECK_JUMPS
    if ((to > from ? to - from : from - to) > 1)
      throw std::logic_error("jump larger than 1 at step " + std::to_string(n));
#endif
    if (to == from + 1) {
      ++right_moves;
    } else {
      last_nonright = n;
      if (to == from) last_self = n;
    }
    // Visit statistics are for X(n) with n = step + 1.
    const std::uint64_t t = n + 1;
    max_state = std::max(max_state, to);
    if (to == x0) {
      ++returns;
      last_return = t;
      if (t <= half) ++origin_first; else ++origin_second;
    }
    if (t >= burn_in) {
      if (t % 2 == 0) even_parity_seen |= 1u << (to & 1);
      for (std::size_t k = 0; k < keys.size(); ++k) {
        const std::uint64_t m = keys[k].size();
        // (t - X(t)) mod m without underflow.
        const std::uint64_t key = (t % m + m - to % m) % m;
        ++keys[k][key];
      }
    }
    if (track_occupation) {
      if (to >= occupation.size()) occupation.resize(to + 1, 0);
      ++occupation[to];
    }
    if (window > 0) {
      ring[ring_pos] = to;
      ring_pos = (ring_pos + 1) % window;
      ring_fill = std::min(ring_fill + 1, window);
    }
  }

  State x0;
  std::uint64_t steps, burn_in, half;
  std::size_t window;
  bool track_occupation;

  std::uint64_t right_moves = 0;
  std::optional<std::uint64_t> last_nonright, last_self, last_return;
  std::uint64_t returns = 0, origin_first = 0, origin_second = 0;
  State max_state = 0;
  unsigned even_parity_seen = 0;
  std::vector<std::vector<std::uint64_t>> keys;
  std::vector<std::uint64_t> occupation;
  std::vector<State> ring;
  std::size_t ring_pos = 0, ring_fill = 0;
};

}  // namespace

EmpiricalReport run_trajectory(const RowTable& rows, const SimulationConfig& config) {
  if (config.steps < 1) throw std::invalid_argument("steps must be >= 1");
  const std::uint64_t burn_in = config.effective_burn_in();
  if (config.steps <= burn_in)
    throw std::invalid_argument("steps must exceed burn-in (" + std::to_string(burn_in) + ")");
  if (rows.max_state() < config.x0 + config.steps)
    throw std::invalid_argument("row table does not cover x0 + steps");

  Detectors det(config);
  det.max_state = config.x0;
  const State final_state = simulate(rows, config.seed, config.x0, config.steps, det);

  EmpiricalReport r;
  r.seed = config.seed;
  r.x0 = config.x0;
  r.steps = config.steps;
  r.burn_in = burn_in;
  r.final_state = final_state;
  r.max_state = det.max_state;
  r.right_moves = det.right_moves;
  r.last_nonright_step = det.last_nonright;
  r.last_self_step = det.last_self;
  // (X(n) + n) mod 2 changes exactly at self-transitions.
  r.parity_lock_step = det.last_self ? *det.last_self + 1 : 0;
  for (auto& k : det.keys) {
    const auto m = static_cast<std::uint32_t>(k.size());
    r.residue_classes.push_back(estimate_residue_classes(m, std::move(k)));
  }
  r.returns_to_origin = {det.returns, det.last_return};
  r.period_estimate =
      detect_period(det.last_nonright, det.last_self, det.even_parity_seen == 3u, burn_in);
  r.origin_visits_first_half = det.origin_first;
  r.origin_visits_second_half = det.origin_second;
  r.occupation = std::move(det.occupation);
  r.tail_window.reserve(det.ring_fill);
  const std::size_t start = det.ring_fill < det.window ? 0 : det.ring_pos;
  for (std::size_t k = 0; k < det.ring_fill; ++k)
    r.tail_window.push_back(det.ring[(start + k) % det.window]);
  return r;
}

EmpiricalReport run_trajectory(const ChainSpec& chain, const SimulationConfig& config) {
  return run_trajectory(RowTable(chain, config.x0 + config.steps), config);
}

std::vector<EmpiricalReport> run_fleet(const ChainSpec& chain, const SimulationConfig& config,
                                       const std::vector<std::uint64_t>& seeds) {
  const RowTable rows(chain, config.x0 + config.steps);
  std::vector<EmpiricalReport> out(seeds.size());
  const auto n = static_cast<std::int64_t>(seeds.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < n; ++k) {
    try {
      SimulationConfig c = config;
      c.seed = seeds[k];
      out[k] = run_trajectory(rows, c);
    } catch (...) {
#pragma omp critical(bdperiod_fleet_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<EmpiricalReport> run_fleet_serial(const ChainSpec& chain,
                                              const SimulationConfig& config,
                                              const std::vector<std::uint64_t>& seeds) {
  const RowTable rows(chain, config.x0 + config.steps);
  std::vector<EmpiricalReport> out;
  out.reserve(seeds.size());
  for (auto s : seeds) {
    SimulationConfig c = config;
    c.seed = s;
    out.push_back(run_trajectory(rows, c));
  }
  return out;
}

ReturnStatistics return_statistics(const ChainSpec& chain, const std::vector<EmpiricalReport>& fleet,
                                   const ProbePolicy& policy) {
  if (fleet.empty()) throw std::invalid_argument("return_statistics needs a nonempty fleet");
  const State x0 = fleet.front().x0;
  for (const auto& r : fleet)
    if (r.x0 != x0) throw std::invalid_argument("fleet members start from different states");

  ReturnStatistics s;
  s.runs = fleet.size();
  std::uint64_t first = 0, second = 0;
  for (const auto& r : fleet) {
    if (r.returns_to_origin.count > 0) ++s.returned_runs;
    first += r.origin_visits_first_half;
    second += r.origin_visits_second_half;
  }
  s.return_fraction = static_cast<double>(s.returned_runs) / static_cast<double>(s.runs);
  s.origin_occupation_ratio =
      first > 0 ? static_cast<double>(second) / static_cast<double>(first) : 0.0;

  ProbePolicy p = policy;
  p.horizon = std::max<std::uint64_t>(p.horizon, x0 + 1);
  const SeriesProbe probe = probe_series(chain, p);
  const Classification cls = classify_from(probe.verdicts.k, probe.verdicts.l);

  if (probe.verdicts.l.converges()) {
    const double l_inf = probe.l_partial.back();
    const double l_before = x0 == 0 ? 0.0 : probe.l_partial[x0 - 1];
    const double tail = l_inf - l_before;
    s.expected_return_probability = 1.0 - std::exp(-probe.log_pi[x0]) / tail;
  }

  if (cls.kind == RecurrenceClass::PositiveRecurrent) {
    std::vector<std::uint64_t> pooled;
    std::uint64_t total = 0;
    for (const auto& r : fleet) {
      if (r.occupation.size() > pooled.size()) pooled.resize(r.occupation.size(), 0);
      for (std::size_t j = 0; j < r.occupation.size(); ++j) {
        pooled[j] += r.occupation[j];
        total += r.occupation[j];
      }
    }
    if (total > 0) {
      const double k_inf = probe.k_partial.back();
      double tv = 0.0, covered = 0.0;
      for (std::size_t j = 0; j < pooled.size(); ++j) {
        const double target = j < probe.log_pi.size() ? std::exp(probe.log_pi[j]) / k_inf : 0.0;
        covered += target;
        tv += std::abs(static_cast<double>(pooled[j]) / static_cast<double>(total) - target);
      }
      tv += std::max(0.0, 1.0 - covered);
      s.occupation_tv = 0.5 * tv;
    }
  }

  if (s.returned_runs < s.runs)
    s.evidence = EmpiricalClass::TransientConsistent;
  else if (s.origin_occupation_ratio < kNullOccupationRatio)
    s.evidence = EmpiricalClass::NullRecurrentConsistent;
  else
    s.evidence = EmpiricalClass::PositiveRecurrentConsistent;
  return s;
}

}  // namespace bdperiod
