#pragma once

#include <cmath>
#include <limits>

namespace bdperiod {

/**
 * A nonnegative running value stored as mantissa * exp(log_scale). The
 * mantissa is rebased whenever it leaves [1e-100, 1e100], so sums whose
 * terms span thousands of orders of magnitude stay representable.
 */
class ScaledSum {
 public:
  /// Adds exp(log_term). A log_term of -inf is a no-op.
  void add_log(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (mantissa_ == 0.0) {
      mantissa_ = 1.0;
      log_scale_ = log_term;
      return;
    }
    const double shift = log_term - log_scale_;
    if (shift > kMaxShift) {
      mantissa_ = mantissa_ * std::exp(-shift) + 1.0;
      log_scale_ = log_term;
    } else {
      mantissa_ += std::exp(shift);
    }
    rebase();
  }

  /// Adds a plain nonnegative value.
  void add(double v) {
    if (v > 0.0) add_log(std::log(v));
  }

  /// Multiplies by exp(log_factor).
  void scale_log(double log_factor) {
    if (mantissa_ == 0.0) return;
    log_scale_ += log_factor;
  }

  /// Multiplies by a positive factor, keeping the exponent in the mantissa
  /// until a rebase is due.
  void scale(double factor) {
    if (mantissa_ == 0.0) return;
    mantissa_ *= factor;
    if (mantissa_ == 0.0) {
      log_scale_ = 0.0;
      return;
    }
    rebase();
  }

  bool empty() const { return mantissa_ == 0.0; }

  double log_value() const {
    return mantissa_ == 0.0 ? -std::numeric_limits<double>::infinity()
                            : log_scale_ + std::log(mantissa_);
  }

  /// exp(log_value() + log_factor), overflowing to +inf if it must.
  double value_times_exp(double log_factor) const {
    if (mantissa_ == 0.0) return 0.0;
    return mantissa_ * std::exp(log_scale_ + log_factor);
  }

  double mantissa() const { return mantissa_; }
  double log_scale() const { return log_scale_; }

 private:
  static constexpr double kLow = 1e-100;
  static constexpr double kHigh = 1e100;
  static constexpr double kMaxShift = 200.0;

  void rebase() {
    if (mantissa_ > kHigh || mantissa_ < kLow) {
      log_scale_ += std::log(mantissa_);
      mantissa_ = 1.0;
    }
  }

  double mantissa_ = 0.0;
  double log_scale_ = 0.0;
};

}  // namespace bdperiod
