#pragma once

// Extended nonnegative reals on top of IEEE doubles: +inf is a legitimate
// value and 0 * inf = 0 throughout.

#include <algorithm>
#include <cmath>
#include <limits>

namespace wolff {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double mul0(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

// base >= 0, exponent > 0.
inline double pow0(double base, double exponent) {
  if (base == 0.0) return 0.0;
  if (std::isinf(base)) return kInf;
  if (exponent == 1.0) return base;
  return std::pow(base, exponent);
}

// num / den with the convention that a zero denominator yields 0.
inline double div0(double num, double den) {
  if (den == 0.0) return 0.0;
  return num / den;
}

// Relative difference |a-b| / max(|a|, |b|, tiny).
inline double rel_diff(double a, double b) {
  if (a == b) return 0.0;
  if (std::isinf(a) || std::isinf(b)) return kInf;
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / scale;
}

// Double-double accumulator (Knuth two-sum). Used where prefix sums are
// later differenced and plain doubles would cancel.
struct Compensated {
  double hi = 0.0;
  double lo = 0.0;

  static Compensated two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    const double err = (a - (s - bb)) + (b - bb);
    return {s, err};
  }

  Compensated& operator+=(double x) {
    const Compensated s = two_sum(hi, x);
    const Compensated r = two_sum(s.hi, s.lo + lo);
    hi = r.hi;
    lo = r.lo;
    return *this;
  }

  friend double difference(const Compensated& a, const Compensated& b) {
    const Compensated h = two_sum(a.hi, -b.hi);
    return h.hi + (h.lo + (a.lo - b.lo));
  }

  double value() const { return hi + lo; }
};

}  // namespace wolff
