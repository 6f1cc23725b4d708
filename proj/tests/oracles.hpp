#pragma once

// Double-exponential quadrature used as an oracle in the tests. It shares no
// code with the library's Gauss-Kronrod integrator.

#include <cmath>
#include <initializer_list>
#include <numbers>

namespace oracle {

namespace detail {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kT = 6.5;  // reaches node distances near 1e-300
constexpr int kMaxLevel = 9;

template <class Sum>
double refine(Sum&& partial, double tol) {
  double h = 0.5;
  double total = partial(h, 0, 1);  // all nodes k*h
  double prev = total * h;
  for (int level = 1; level <= kMaxLevel; ++level) {
    h *= 0.5;
    total += partial(h, 1, 2);  // new odd nodes only
    const double est = total * h;
    if (level >= 4 && std::abs(est - prev) <= tol * std::abs(est)) return est;
    prev = est;
  }
  return prev;
}

}  // namespace detail

/// Integral over the finite interval [a, b]. A singularity is resolved to
/// ~1e-300 at `a` but only to ~1e-16 relative at `b`, where x rounds to b;
/// mirror the integrand when the upper endpoint is singular.
template <class F>
double tanh_sinh(F f, double a, double b, double tol = 1e-13) {
  const double half = 0.5 * (b - a);
  auto partial = [&](double h, int first, int stride) {
    double s = 0.0;
    const int kmax = static_cast<int>(std::ceil(detail::kT / h));
    for (int k = first; k <= kmax; k += stride) {
      for (int sign : {1, -1}) {
        if (k == 0 && sign == -1) continue;
        const double t = sign * k * h;
        const double u = detail::kHalfPi * std::sinh(t);
        const double cu = std::cosh(u);
        const double w = detail::kHalfPi * std::cosh(t) / (cu * cu);
        // Distance to the nearer endpoint, computed without cancellation.
        const double gap = 2.0 * half / (std::exp(2.0 * std::abs(u)) + 1.0);
        if (!(gap > 0.0) || !(w > 0.0)) continue;
        const double x = u >= 0.0 ? b - gap : a + gap;
        const double fx = f(x);
        if (std::isfinite(fx)) s += half * w * fx;
      }
    }
    return s;
  };
  return detail::refine(partial, tol);
}

/// Integral over [a, +inf).
template <class F>
double exp_sinh(F f, double a, double tol = 1e-13) {
  auto partial = [&](double h, int first, int stride) {
    double s = 0.0;
    const int kmax = static_cast<int>(std::ceil(detail::kT / h));
    for (int k = first; k <= kmax; k += stride) {
      for (int sign : {1, -1}) {
        if (k == 0 && sign == -1) continue;
        const double t = sign * k * h;
        const double e = std::exp(detail::kHalfPi * std::sinh(t));
        const double w = detail::kHalfPi * std::cosh(t) * e;
        if (!std::isfinite(w) || !(e > 0.0)) continue;
        const double fx = f(a + e);
        if (std::isfinite(fx)) s += w * fx;
      }
    }
    return s;
  };
  return detail::refine(partial, tol);
}

}  // namespace oracle
