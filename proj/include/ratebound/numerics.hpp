#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ratebound/error.hpp"

namespace ratebound {

/// A real number in [0, 1]. Construction checks the range; reading it back
/// is implicit so arithmetic stays readable.
class Probability {
public:
  constexpr Probability() = default;

  explicit Probability(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw Error(ErrorKind::domain,
                  "probability out of [0,1]: " + std::to_string(value));
    }
  }

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

private:
  double value_ = 0.0;
};

// ---------------------------------------------------------------------------
// Standard normal distribution
// ---------------------------------------------------------------------------

inline double std_normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

/// Phi(x). erfc keeps relative accuracy in the lower tail, which the
/// quantile refinement and small error rates rely on.
inline Probability std_normal_cdf(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorKind::invalid_argument, "std_normal_cdf: non-finite input");
  }
  return Probability(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

namespace detail {

template <std::size_t N>
constexpr double horner(const double (&c)[N], double x) noexcept {
  double acc = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) {
    acc = acc * x + c[i];
  }
  return acc;
}

// Wichura (1988), algorithm AS 241, PPND16. About 16 significant digits.
inline double ppnd16(double p) noexcept {
  static constexpr double a[] = {
      3.3871328727963666080e0, 1.3314166789178437745e+2,
      1.9715909503065514427e+3, 1.3731693765509461125e+4,
      4.5921953931549871457e+4, 6.7265770927008700853e+4,
      3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double b[] = {
      1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2,
      5.3941960214247511077e+3, 2.1213794301586595867e+4,
      3.9307895800092710610e+4, 2.8729085735721942674e+4,
      5.2264952788528545610e+3};
  static constexpr double c[] = {
      1.42343711074968357734e0, 4.63033784615654529590e0,
      5.76949722146069140550e0, 3.64784832476320460504e0,
      1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[] = {
      1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
      6.89767334985100004550e-1, 1.48103976427480074590e-1,
      1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9};
  static constexpr double e[] = {
      6.65790464350110377720e0, 5.46378491116411436990e0,
      1.78482653991729133580e0, 2.96560571828504891230e-1,
      2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {
      1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
      1.48753612908506148525e-2, 7.86869131145613259100e-4,
      1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(a, r) / horner(b, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = horner(c, r) / horner(d, r);
  } else {
    r -= 5.0;
    x = horner(e, r) / horner(f, r);
  }
  return q < 0.0 ? -x : x;
}

} // namespace detail

/// Inverse of Phi on (0, 1). One Newton step against std_normal_cdf keeps
/// the pair consistent to rounding.
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::domain,
                "std_normal_quantile requires 0 < p < 1, got " + std::to_string(p));
  }
  double x = detail::ppnd16(p);
  const double density = std_normal_pdf(x);
  if (density > 0.0) {
    x -= (std_normal_cdf(x).value() - p) / density;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Gaussian-weighted integration
// ---------------------------------------------------------------------------

/// Nodes and weights for integrals against the standard normal density.
struct QuadratureRule {
  std::vector<double> nodes;   // strictly increasing
  std::vector<double> weights; // positive, sum to 1

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss-Hermite rule with `n` nodes, rescaled from the exp(-x^2) weight to
/// the standard normal density. Nodes come from Newton iteration on the
/// orthonormal Hermite recurrence (Numerical Recipes, gauher).
inline QuadratureRule gauss_hermite_rule(std::size_t n) {
  if (n < 2) {
    throw Error(ErrorKind::invalid_argument, "gauss_hermite_rule needs n >= 2");
  }
  constexpr double kPiM4 = 0.7511255444649425; // pi^(-1/4)
  constexpr int kMaxIter = 100;
  const double dn = static_cast<double>(n);
  std::vector<double> x(n), w(n);
  const std::size_t m = (n + 1) / 2;
  double z = 0.0;
  double pp = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * dn + 1.0) - 1.85575 * std::pow(2.0 * dn + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(dn, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
      double p1 = kPiM4;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double dj = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / dj) * p2 - std::sqrt((dj - 1.0) / dj) * p3;
      }
      pp = std::sqrt(2.0 * dn) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 3e-14 * std::max(1.0, std::abs(z))) {
        break;
      }
    }
    if (iter == kMaxIter) {
      throw Error(ErrorKind::numeric, "Gauss-Hermite node iteration did not converge");
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // x was filled largest first; reverse to ascending order.
    rule.nodes[i] = std::numbers::sqrt2 * x[n - 1 - i];
    rule.weights[i] = w[n - 1 - i];
    total += rule.weights[i];
  }
  for (double &wi : rule.weights) {
    wi /= total;
  }
  return rule;
}

inline constexpr std::size_t kDefaultQuadratureNodes = 128;

inline const QuadratureRule &default_gaussian_rule() {
  static const QuadratureRule rule = gauss_hermite_rule(kDefaultQuadratureNodes);
  return rule;
}

/// Integral of phi(y) f(y) dy over the real line.
template <class F>
double integrate_gaussian(F &&f, const QuadratureRule &rule = default_gaussian_rule()) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::numeric,
                  "integrand non-finite at node " + std::to_string(rule.nodes[i]));
    }
    sum += rule.weights[i] * v;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Bracketed root finding
// ---------------------------------------------------------------------------

/// Brent's method on [lo, hi]. Stops once the bracket is narrower than `tol`
/// or f hits exactly zero. The result always lies inside the initial bracket.
template <class F>
double find_root(F &&f, double lo, double hi, double tol) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi) || !(tol > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "find_root: invalid bracket or tolerance");
  }
  auto eval = [&f](double x) {
    const double v = f(x);
    if (std::isnan(v)) {
      throw Error(ErrorKind::numeric, "find_root: NaN at x=" + std::to_string(x));
    }
    return v;
  };

  double a = lo, b = hi;
  double fa = eval(a), fb = eval(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorKind::bracketing,
                "no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }

  constexpr int kMaxIter = 500;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  double c = b, fc = fb;
  double d = b - a, e = d;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) {
      return std::clamp(b, lo, hi);
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // Secant or inverse quadratic interpolation.
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = eval(b);
  }
  throw Error(ErrorKind::numeric, "find_root: iteration limit reached");
}

} // namespace ratebound
