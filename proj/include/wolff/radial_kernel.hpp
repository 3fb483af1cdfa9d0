#pragma once

// Nonincreasing radial kernels k(r) on (0, inf).
//
// Besides the profile each kernel exposes G, a primitive of k(s)/s
// ("log-antiderivative"), so that
//   log_primitive(a, b) = int_a^b k(s) ds / s = G(b) - G(a).
// Exact Stieltjes sums against atomic measures are built on G.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <optional>
#include <string>

#include "wolff/errors.hpp"
#include "wolff/extended.hpp"

namespace wolff {

class RadialKernel {
 public:
  enum class Family { riesz, log, constant };

  // Relative tolerance of the adaptive quadrature behind log-kernel primitives.
  static constexpr double kPrimitiveTolerance = 1e-10;

  // k(r) = r^(alpha - n), optionally k = 0 beyond `cutoff`.
  static RadialKernel riesz(double alpha, int n, std::optional<double> cutoff = std::nullopt) {
    if (n < 1) throw InvalidArgument("riesz kernel: dimension must be >= 1");
    if (!(alpha > 0.0 && alpha < n)) throw InvalidArgument("riesz kernel: alpha must lie in (0, n)");
    RadialKernel k(Family::riesz, n);
    k.alpha_ = alpha;
    k.set_cutoff(cutoff);
    k.validate_monotone();
    return k;
  }

  // k(r) = 1 / (r^n log^beta(C / r)) for 0 < r <= 1 and k = 0 for r > 1.
  static RadialKernel log_kernel(double beta, double c, int n) {
    if (n < 1) throw InvalidArgument("log kernel: dimension must be >= 1");
    if (!(beta > 1.0)) throw InvalidArgument("log kernel: beta must be > 1");
    const double c_min = std::exp(beta / n);
    if (!(c >= c_min * (1.0 - 1e-12))) {
      throw InvalidArgument("log kernel: C must be >= e^(beta/n) = " + std::to_string(c_min) +
                            " for k to be nonincreasing");
    }
    RadialKernel k(Family::log, n);
    k.beta_ = beta;
    k.c_ = c;
    k.log_c_ = std::log(c);
    k.cutoff_ = 1.0;
    k.validate_monotone();
    return k;
  }

  static RadialKernel constant(double value, int n, std::optional<double> cutoff = std::nullopt) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw InvalidArgument("constant kernel: value must be finite and >= 0");
    }
    RadialKernel k(Family::constant, n);
    k.value_ = value;
    k.set_cutoff(cutoff);
    return k;
  }

  Family family() const { return family_; }
  int dimension() const { return n_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double log_constant() const { return c_; }
  double constant_value() const { return value_; }
  std::optional<double> cutoff() const { return cutoff_; }

  std::string describe() const {
    std::string s;
    switch (family_) {
      case Family::riesz: s = "riesz(alpha=" + std::to_string(alpha_) + ")"; break;
      case Family::log:
        s = "log_kernel(beta=" + std::to_string(beta_) + ", C=" + std::to_string(c_) + ")";
        break;
      case Family::constant: s = "constant(" + std::to_string(value_) + ")"; break;
    }
    if (cutoff_ && family_ != Family::log) s += " cutoff=" + std::to_string(*cutoff_);
    return s;
  }

  double operator()(double r) const {
    if (!(r > 0.0)) return at_zero();
    if (cutoff_ && r > *cutoff_) return 0.0;
    switch (family_) {
      case Family::riesz: return std::pow(r, alpha_ - n_);
      case Family::log: return std::pow(r, -n_) * std::pow(log_c_ - std::log(r), -beta_);
      case Family::constant: return value_;
    }
    return 0.0;
  }

  // lim_{r -> 0+} k(r).
  double at_zero() const { return family_ == Family::constant ? value_ : kInf; }

  // G(s) for s >= 0; G(0) = -inf for every family here (k(s)/s is not
  // integrable at 0).
  double antiderivative(double s) const {
    if (s < 0.0) throw InvalidArgument("antiderivative needs s >= 0");
    if (s == 0.0) return value_ == 0.0 && family_ == Family::constant ? 0.0 : -kInf;
    if (std::isinf(s)) return antiderivative_at_infinity();
    if (cutoff_ && s > *cutoff_) s = *cutoff_;
    switch (family_) {
      case Family::riesz: {
        const double e = alpha_ - n_;
        return std::pow(s, e) / e;
      }
      case Family::log: {
        if (s >= 1.0) return 0.0;
        const double u = -std::log(s);
        return -log_integral(u, u);
      }
      case Family::constant: return value_ == 0.0 ? 0.0 : value_ * std::log(s);
    }
    return 0.0;
  }

  // lim_{s -> inf} G(s); +inf when int^inf k(s) ds/s diverges.
  double antiderivative_at_infinity() const {
    if (cutoff_) return antiderivative(*cutoff_);
    switch (family_) {
      case Family::riesz: return 0.0;
      case Family::log: return 0.0;
      case Family::constant: return value_ == 0.0 ? 0.0 : kInf;
    }
    return 0.0;
  }

  // int_a^b k(s) ds / s for 0 <= a <= b (b may be +inf).
  double log_primitive(double a, double b) const {
    if (!(a >= 0.0) || !(b >= a)) throw InvalidArgument("log_primitive needs 0 <= a <= b");
    if (a == b) return 0.0;
    if (cutoff_) {
      a = std::min(a, *cutoff_);
      b = std::min(b, *cutoff_);
      if (a == b) return 0.0;
    }
    if (a == 0.0) return (family_ == Family::constant && value_ == 0.0) ? 0.0 : kInf;
    switch (family_) {
      case Family::riesz: {
        const double e = alpha_ - n_;
        if (std::isinf(b)) return -std::pow(a, e) / e;
        return (std::pow(b, e) - std::pow(a, e)) / e;
      }
      case Family::log: {
        const double hi = std::min(b, 1.0);
        if (a >= hi) return 0.0;
        // log(hi / a) via log1p keeps short spans accurate.
        return log_integral(-std::log(a), std::log1p((hi - a) / a));
      }
      case Family::constant: return std::isinf(b) ? kInf : value_ * std::log(b / a);
    }
    return 0.0;
  }

 private:
  RadialKernel(Family f, int n) : family_(f), n_(n) {}

  void set_cutoff(std::optional<double> cutoff) {
    if (cutoff && !(*cutoff > 0.0)) throw InvalidArgument("kernel cutoff must be positive");
    cutoff_ = cutoff;
  }

  // int_{u2 - span}^{u2} e^{n u} (log C + u)^(-beta) du, the log-kernel
  // primitive in the variable u = log(1/s). Factoring out e^{n u2} keeps the
  // quadrature integrand in [0, 1].
  double log_integral(double u2, double span) const {
    if (!(span > 0.0)) return 0.0;
    // Integrate over [0, 1] and rescale: Boost's error estimate carries an
    // absolute roundoff floor that never meets a relative tolerance on tiny
    // spans, which would drive the adaptive scheme to its depth limit.
    auto f = [&](double t) {
      const double v = span * t;
      return std::exp(-n_ * v) * std::pow(log_c_ + u2 - v, -beta_);
    };
    double error = 0.0;
    const double inner = span * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                                    f, 0.0, 1.0, 20, kPrimitiveTolerance, &error);
    const double scale = n_ * u2;
    if (scale > 700.0) return kInf;
    return std::exp(scale) * inner;
  }

  // Log-spaced scan, 512 points per decade over [1e-8, 1e4].
  void validate_monotone() const {
    constexpr int kPerDecade = 512;
    double prev = (*this)(1e-8);
    for (int i = 1; i <= 12 * kPerDecade; ++i) {
      const double r = 1e-8 * std::pow(10.0, double(i) / kPerDecade);
      const double v = (*this)(r);
      if (v > prev * (1.0 + 1e-12)) {
        throw InvalidArgument("kernel " + describe() + " is not nonincreasing near r = " +
                              std::to_string(r));
      }
      prev = v;
    }
  }

  Family family_;
  int n_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double c_ = 0.0;
  double log_c_ = 0.0;
  double value_ = 0.0;
  std::optional<double> cutoff_;
};

}  // namespace wolff
