#include "dhillon/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "dhillon/errors.hpp"

namespace dhillon {

void RootConfig::validate() const {
  if (!(abs_tol > 0.0)) throw DomainError("RootConfig: abs_tol must be positive");
  if (max_iter < 1) throw DomainError("RootConfig: max_iter must be at least 1");
  if (bracket && !(bracket->first < bracket->second)) {
    throw DomainError("RootConfig: bracket must satisfy lo < hi");
  }
}

namespace {

bool same_sign(double a, double b) { return (a < 0.0) == (b < 0.0); }

std::pair<double, double> search_bracket(const ScalarFn& f) {
  double lo = -1.0;
  double hi = 1.0;
  for (int k = 0; k < 48; ++k) {
    const double flo = f(lo);
    const double fhi = f(hi);
    if (std::isfinite(flo) && std::isfinite(fhi) && !same_sign(flo, fhi)) return {lo, hi};
    lo *= 2.0;
    hi *= 2.0;
  }
  throw NoBracket("find_root: no sign change found while expanding the search interval");
}

// `propose(x_prev, f_prev, x, fx)` returns the next candidate; anything not
// strictly inside the current bracket is replaced by the midpoint.
template <class Propose>
double guarded_solve(const ScalarFn& f, const RootConfig& cfg, Propose propose) {
  cfg.validate();
  auto [lo, hi] = cfg.bracket ? *cfg.bracket : search_bracket(f);
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!(std::isfinite(flo) && std::isfinite(fhi)) || same_sign(flo, fhi)) {
    throw NoBracket("find_root: f(lo) = " + num(flo) + " and f(hi) = " +
                    num(fhi) + " do not bracket a root");
  }

  const double tol = cfg.abs_tol;
  double x_prev = lo, f_prev = flo;
  double x = hi, fx = fhi;
  double width_prev1 = kInf;  // bracket width one and two iterations back
  double width_prev2 = kInf;

  auto update = [&](double xn, double fn) {
    if (same_sign(fn, flo)) {
      lo = xn;
      flo = fn;
    } else {
      hi = xn;
      fhi = fn;
    }
  };

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const double width = hi - lo;
    if (width < tol) return std::abs(flo) < std::abs(fhi) ? lo : hi;

    double cand = propose(x_prev, f_prev, x, fx);
    // Two steps without halving the bracket: take a bisection step instead.
    const bool stalled = width > 0.5 * width_prev2;
    if (!std::isfinite(cand) || !(cand > lo && cand < hi) || stalled) cand = 0.5 * (lo + hi);

    const double fc = f(cand);
    if (fc == 0.0) return cand;
    update(cand, fc);
    const double step = std::abs(cand - x);
    x_prev = x;
    f_prev = fx;
    x = cand;
    fx = fc;

    // A tiny step means we are within tol of the root; probe across it so the
    // bracket itself collapses.
    if (step < 0.5 * tol && hi - lo >= tol) {
      const double probe = (lo == x) ? std::min(x + 0.5 * tol, hi) : std::max(x - 0.5 * tol, lo);
      if (probe > lo && probe < hi) {
        const double fp = f(probe);
        if (fp == 0.0) return probe;
        update(probe, fp);
      }
    }
    width_prev2 = width_prev1;
    width_prev1 = width;
  }
  if (hi - lo < tol) return std::abs(flo) < std::abs(fhi) ? lo : hi;
  throw MaxIterExceeded("find_root: bracket [" + num(lo) + ", " + num(hi) +
                        "] still wider than abs_tol after " + std::to_string(cfg.max_iter) +
                        " iterations");
}

}  // namespace

double find_root(const ScalarFn& f, const RootConfig& cfg) {
  return guarded_solve(f, cfg, [](double x0, double f0, double x1, double f1) {
    if (f1 == f0) return std::numeric_limits<double>::quiet_NaN();
    return x1 - f1 * (x1 - x0) / (f1 - f0);
  });
}

double find_root(const ScalarFn& f, const ScalarFn& df, const RootConfig& cfg) {
  return guarded_solve(f, cfg, [&df](double, double, double x1, double f1) {
    const double d = df(x1);
    if (d == 0.0 || !std::isfinite(d)) return std::numeric_limits<double>::quiet_NaN();
    return x1 - f1 / d;
  });
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const ScalarFn& g, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = g(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = g(center - dx);
    f2[j] = g(center + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double ah = std::abs(half);
  double err = std::abs((resk - resg) * half);
  resasc *= ah;
  resabs *= ah;
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(resk)) err = kInf;
  return {lo, hi, resk * half, err};
}

}  // namespace

QuadResult integrate(const ScalarFn& f, double a, double b, double tol, int max_subdivisions) {
  if (!(tol > 0.0)) throw DomainError("integrate: tol must be positive");
  if (std::isnan(a) || std::isnan(b) || !std::isfinite(a)) {
    throw DomainError("integrate: lower limit must be finite");
  }
  if (a == b) return {0.0, 0.0, true};
  if (b < a) {
    auto r = integrate(f, b, a, tol, max_subdivisions);
    r.value = -r.value;
    return r;
  }

  ScalarFn g = f;
  double lo = a, hi = b;
  if (std::isinf(b)) {
    g = [&f, a](double u) {
      const double one_minus = 1.0 - u;
      return f(a + u / one_minus) / (one_minus * one_minus);
    };
    lo = 0.0;
    hi = 1.0;
  }

  std::priority_queue<Segment> heap;
  Segment first = kronrod15(g, lo, hi);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int splits = 0;
  bool stuck = false;
  while (total_err > tol && splits < max_subdivisions) {
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      stuck = true;
      break;
    }
    heap.pop();
    const Segment left = kronrod15(g, worst.lo, mid);
    const Segment right = kronrod15(g, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }

  // Re-sum from scratch; the running totals accumulate cancellation noise.
  total = 0.0;
  total_err = 0.0;
  std::vector<Segment> segs;
  segs.reserve(heap.size());
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(), [](const Segment& x, const Segment& y) { return x.lo < y.lo; });
  for (const auto& s : segs) {
    total += s.value;
    total_err += s.error;
  }
  const bool ok = !stuck && std::isfinite(total) && total_err <= tol;
  return {total, total_err, ok};
}

// ---------------------------------------------------------------------------
// Special functions

namespace {

// Continued fraction for the incomplete beta, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 2000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw MaxIterExceeded("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double beta_function(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_function: a and b must be positive");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double incomplete_beta(double z, double a, double b) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("incomplete_beta: z must lie in [0, 1]");
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete_beta: a and b must be positive");
  if (z == 0.0) return 0.0;
  if (z == 1.0) return beta_function(a, b);
  const double front = std::exp(a * std::log(z) + b * std::log1p(-z));
  if (z < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, z) / a;
  return beta_function(a, b) - front * beta_continued_fraction(b, a, 1.0 - z) / b;
}

double j_beta(double beta, double r) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("j_beta: beta must be positive");
  if (!(r > 0.0 && r < 1.0)) throw DomainError("j_beta: r must lie in (0, 1)");
  const double s = beta * std::log(r);  // log r^beta, always negative
  const double em1 = std::expm1(s);     // r^beta - 1
  if (std::abs(s) >= 0.5) {
    const double num = s * (em1 + 2.0) - 2.0 * em1;
    return num / (em1 * em1 * em1);
  }
  // Numerator s(e^s + 1) - 2(e^s - 1) = sum_{k>=3} (k-2) s^k / k!, divided by s^3.
  double num = 0.0;
  double term = 1.0 / 6.0;  // s^0 / 3!
  for (int j = 0; j < 40; ++j) {
    const double contrib = (j + 1) * term;
    num += contrib;
    if (std::abs(contrib) < 1e-18 * std::abs(num)) break;
    term *= s / (j + 4);
  }
  const double ratio = (s == 0.0) ? 1.0 : em1 / s;
  return num / (ratio * ratio * ratio);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double digamma(double x) {
  if (!std::isfinite(x) || (x <= 0.0 && x == std::floor(x))) {
    throw DomainError("digamma: pole or non-finite argument");
  }
  if (x < 0.0) return digamma(1.0 - x) - std::numbers::pi / std::tan(std::numbers::pi * x);
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double f = 1.0 / (x * x);
  return acc + std::log(x) - 0.5 / x -
         f * (1.0 / 12 -
              f * (1.0 / 120 - f * (1.0 / 252 - f * (1.0 / 240 - f * (1.0 / 132 - f * (691.0 / 32760 - f / 12))))));
}

double trigamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("trigamma: argument must be positive");
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double f = inv * inv;
  return acc + inv + 0.5 * f +
         inv * f * (1.0 / 6 - f * (1.0 / 30 - f * (1.0 / 42 - f * (1.0 / 30 - f * (5.0 / 66 - f * 691.0 / 2730)))));
}

}  // namespace dhillon
