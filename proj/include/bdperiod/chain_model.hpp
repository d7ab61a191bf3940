#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace bdperiod {

using State = std::uint64_t;

/// One row of the tridiagonal transition matrix: P(i,i-1), P(i,i), P(i,i+1).
struct Transition {
  double q = 0.0;
  double r = 0.0;
  double p = 0.0;

  /// Row sum in the canonical evaluation order. Every validated row has
  /// p == 1 - (q + r), which makes this exactly 1.0.
  double sum() const { return (q + r) + p; }

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Natural logs of a row. Accurate where the linear row underflows (the
/// ProductPositive and GeometricSelf tails decay geometrically).
struct LogTransition {
  double log_q = 0.0;
  double log_r = 0.0;
  double log_p = 0.0;
};

// Tail families generate rows for every state i >= n0. Each one is chosen so
// the infinite-series criteria have a closed-form verdict; see
// series_analysis.cpp for the rule table.
namespace tail {

/// (q, r, p) for every tail state.
struct Constant {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
  friend bool operator==(const Constant&, const Constant&) = default;
};

/// r_i = c * rho^i; p_i and q_i share the remaining mass in ratio p : q.
struct GeometricSelf {
  double p = 0.0;
  double q = 0.0;
  double c = 0.0;
  double rho = 0.0;
  friend bool operator==(const GeometricSelf&, const GeometricSelf&) = default;
};

/// r_i = c / (i+1)^alpha; p_i and q_i share the remaining mass in ratio p : q.
struct PowerSelf {
  double p = 0.0;
  double q = 0.0;
  double c = 0.0;
  double alpha = 0.0;
  friend bool operator==(const PowerSelf&, const PowerSelf&) = default;
};

/// p_i = 1 - c rho^i, q_i = r_i = c rho^i / 2.
struct ProductPositive {
  double c = 0.0;
  double rho = 0.0;
  friend bool operator==(const ProductPositive&, const ProductPositive&) = default;
};

/// r_i = 0 with constant (q, p).
struct ZeroSelfTail {
  double p = 0.0;
  double q = 0.0;
  friend bool operator==(const ZeroSelfTail&, const ZeroSelfTail&) = default;
};

/// Constant self-transition r with a decaying drift:
/// q_i = (1 - r)(1 - a/(i+1)^alpha)/2, p_i = (1 - r)(1 + a/(i+1)^alpha)/2.
/// The critical case alpha == 1, a != 0 has no closed-form rule and is left
/// to the numeric fallback.
struct DriftDecay {
  double r = 0.0;
  double a = 0.0;
  double alpha = 0.0;
  friend bool operator==(const DriftDecay&, const DriftDecay&) = default;
};

}  // namespace tail

using TailFamily = std::variant<tail::Constant, tail::GeometricSelf, tail::PowerSelf,
                                tail::ProductPositive, tail::ZeroSelfTail, tail::DriftDecay>;

std::string_view family_name(const TailFamily& tail);

enum class ChainErrorCode {
  ParseError,
  UnknownField,
  RowSumError,
  NonPositiveRate,
  AllZeroSelf,
  BadFamilyParams,
};

std::string_view to_string(ChainErrorCode code);

class ChainError : public std::runtime_error {
 public:
  ChainError(ChainErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ChainErrorCode code() const { return code_; }

 private:
  ChainErrorCode code_;
};

/// Rows within this distance of summing to one are rescaled; anything
/// further off is rejected.
inline constexpr double kRowSumTolerance = 1e-12;

/**
 * A validated birth-death chain on {0, 1, ...}: an explicit prefix of rows
 * for states 0..n0-1 followed by an analytic tail family.
 *
 * Guarantees, for every state i: q_0 = 0, p_i > 0, q_{i+1} > 0, r_i >= 0,
 * and row(i).sum() == 1.0 exactly. At least one r_i is positive.
 *
 * Immutable after construction.
 */
class ChainSpec {
 public:
  /// Validates and normalizes. Throws ChainError.
  static ChainSpec build(std::vector<Transition> prefix, TailFamily tail);

  Transition row(State i) const;
  LogTransition log_row(State i) const;

  std::size_t n0() const { return prefix_.size(); }
  const std::vector<Transition>& prefix() const { return prefix_; }
  const TailFamily& tail() const { return tail_; }

  /// True if row 0 carried q_0 > 0 and it was folded into r_0.
  bool row0_adjusted() const { return row0_adjusted_; }

  /// True if r_i > 0 for some tail state i >= from.
  bool tail_has_positive_self(State from) const;

  /// Same rows everywhere; the row-0 provenance flag is not compared.
  friend bool operator==(const ChainSpec& a, const ChainSpec& b) {
    return a.prefix_ == b.prefix_ && a.tail_ == b.tail_;
  }

 private:
  ChainSpec() = default;
  Transition tail_row(State i) const;

  std::vector<Transition> prefix_;
  TailFamily tail_;
  bool row0_adjusted_ = false;
};

/// Parses a chain-spec document:
///   {"prefix": [[q,r,p],...], "tail": {"family": <name>, ...}, "n0": <int>}
/// "n0" is optional and must match the prefix length. Unknown fields are
/// rejected.
ChainSpec build_chain(const nlohmann::json& doc);
ChainSpec load_chain(const std::filesystem::path& path);

/// Normalized document; build_chain(chain_to_json(c)) == c.
nlohmann::json chain_to_json(const ChainSpec& chain);

}  // namespace bdperiod
