#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bdperiod {

/// Outcome of deciding whether an infinite series (or product) diverges.
enum class Outcome { Diverges, Converges, Undecided };

enum class Method { Analytic, NumericThreshold };

/**
 * A three-valued convergence decision together with the evidence that
 * produced it. Analytic verdicts are never Undecided.
 */
struct Verdict {
  Outcome outcome = Outcome::Undecided;
  Method method = Method::NumericThreshold;
  std::uint64_t horizon_used = 0;
  double partial_value = 0.0;

  bool decided() const { return outcome != Outcome::Undecided; }
  bool diverges() const { return outcome == Outcome::Diverges; }
  bool converges() const { return outcome == Outcome::Converges; }

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

std::string_view to_string(Outcome o);
std::string_view to_string(Method m);
Outcome outcome_from_string(std::string_view s);
Method method_from_string(std::string_view s);

/// Two decided criteria disagree. Never a valid state of a correct
/// implementation.
class ContradictionDetected : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace bdperiod
