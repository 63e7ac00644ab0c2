#include "slepf/specfun.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace slepf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool is_nonpositive_integer(double x, double tol = 1e-13) {
  return x <= tol && std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x));
}

// Series terminates when a or b is a nonpositive integer; returns the degree, or -1.
int terminating_degree(double a, double b) {
  int deg = -1;
  for (double p : {a, b}) {
    if (is_nonpositive_integer(p)) {
      const int d = static_cast<int>(-std::round(p));
      deg = deg < 0 ? d : std::min(deg, d);
    }
  }
  return deg;
}

double polynomial_2f1(double a, double b, double c, double z, int degree) {
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < degree; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
  }
  return sum;
}

// Taylor re-expansion of z(1-z)F'' + [c - (a+b+1)z]F' - abF = 0 about z0, with
// (F, F') at z0 given; returns (F, F') at z1. Requires |z1 - z0| < min(z0, 1 - z0).
std::pair<double, double> ode_step(double a, double b, double c, double z0, double f, double fp, double z1) {
  // With w = z - z0 the ODE gives, for Taylor coefficients t_n:
  //   z0(1-z0)(n+2)(n+1) t_{n+2} + (1-2z0)(n+1)n t_{n+1} - n(n-1) t_n
  //   + [c-(a+b+1)z0](n+1) t_{n+1} - (a+b+1) n t_n - ab t_n = 0.
  const double p = z0 * (1.0 - z0);
  const double q = 1.0 - 2.0 * z0;
  const double r = c - (a + b + 1.0) * z0;
  const double s = a + b + 1.0;
  const double w = z1 - z0;
  double tm = f, tn = fp;  // t_n, t_{n+1} at n = 0
  double val = tm + tn * w, der = tn;
  double wpow = w;  // w^{n+1}
  for (int n = 0; n < 4000; ++n) {
    const double nn = n;
    const double next = -((q * (nn + 1.0) * nn + r * (nn + 1.0)) * tn - (nn * (nn - 1.0) + s * nn + a * b) * tm) /
                        (p * (nn + 2.0) * (nn + 1.0));
    const double dterm = (nn + 2.0) * next * wpow;
    wpow *= w;
    const double vterm = next * wpow;
    val += vterm;
    der += dterm;
    tm = tn;
    tn = next;
    if (n > 8 && std::abs(vterm) <= kEps * std::abs(val) * 1e-2 && std::abs(dterm) <= kEps * std::abs(der) * 1e-2) {
      break;
    }
  }
  return {val, der};
}

double series_derivative(double a, double b, double c, double z) {
  return a * b / c * gauss_2f1_series(a + 1.0, b + 1.0, c + 1.0, z);
}

double continue_by_ode(double a, double b, double c, double z) {
  double z0 = 0.5;
  double f = gauss_2f1_series(a, b, c, z0);
  double fp = series_derivative(a, b, c, z0);
  while (z - z0 > 0.0) {
    const double reach = 0.5 * (1.0 - z0);
    const double z1 = std::min(z, z0 + reach);
    std::tie(f, fp) = ode_step(a, b, c, z0, f, fp, z1);
    z0 = z1;
  }
  return f;
}

}  // namespace

double gamma_fn(double x) {
  if (is_nonpositive_integer(x, 0.0)) throw DomainError("gamma_fn: pole at nonpositive integer");
  return std::tgamma(x);
}

double lgamma_fn(double x) {
  if (is_nonpositive_integer(x, 0.0)) throw DomainError("lgamma_fn: pole at nonpositive integer");
  return std::lgamma(x);
}

double beta_fn(double a, double b) {
  if (a > 0.0 && b > 0.0) return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b);
}

double gauss_2f1_series(double a, double b, double c, double z) {
  if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c is a nonpositive integer");
  double term = 1.0, sum = 1.0;
  for (int n = 0; n < 100000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (term == 0.0) break;
    if (n > 4 && std::abs(term) <= 0.25 * kEps * std::abs(sum)) break;
  }
  return sum;
}

double gauss_2f1_connection(double a, double b, double c, double z) {
  const double m = c - a - b;
  if (std::abs(m - std::round(m)) < 1e-14) throw DomainError("gauss_2f1_connection: c - a - b is an integer");
  const double w = 1.0 - z;
  struct Coefficients {
    double a = std::numeric_limits<double>::quiet_NaN(), b = 0.0, c = 0.0;
    double A = 0.0, B = 0.0;
  };
  thread_local Coefficients cache;
  if (cache.a != a || cache.b != b || cache.c != c) {
    cache = {a, b, c, gamma_fn(c) * gamma_fn(m) / (gamma_fn(c - a) * gamma_fn(c - b)),
             gamma_fn(c) * gamma_fn(-m) / (gamma_fn(a) * gamma_fn(b))};
  }
  const double A = cache.A, B = cache.B;
  const double first = A * gauss_2f1_series(a, b, 1.0 - m, w);
  if (w == 0.0) return first;
  return first + B * std::pow(w, m) * gauss_2f1_series(c - a, c - b, m + 1.0, w);
}

double gauss_2f1(double a, double b, double c, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError("gauss_2f1: z must lie in [0, 1]");
  if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c is a nonpositive integer");
  if (z == 0.0) return 1.0;
  if (const int deg = terminating_degree(a, b); deg >= 0) return polynomial_2f1(a, b, c, z, deg);
  const double m = c - a - b;
  if (z == 1.0) {
    if (m <= 0.0) return std::numeric_limits<double>::infinity();
    return gamma_fn(c) * gamma_fn(m) / (gamma_fn(c - a) * gamma_fn(c - b));
  }
  if (z <= 0.5) return gauss_2f1_series(a, b, c, z);
  if (std::abs(m - std::round(m)) >= 1e-2) return gauss_2f1_connection(a, b, c, z);
  // Near-integer c - a - b: the two connection terms cancel catastrophically.
  return continue_by_ode(a, b, c, z);
}

namespace {

double agm(double a, double g) {
  for (int i = 0; i < 100 && std::abs(a - g) > 4.0 * kEps * a; ++i) {
    const double an = 0.5 * (a + g);
    g = std::sqrt(a * g);
    a = an;
  }
  return 0.5 * (a + g);
}

}  // namespace

double ellint_k(double k) {
  if (!(k >= 0.0 && k < 1.0)) throw DomainError("ellint_k: modulus must lie in [0, 1)");
  return std::numbers::pi / (2.0 * agm(1.0, std::sqrt((1.0 - k) * (1.0 + k))));
}

JacobiElliptic jacobi_elliptic(double u, double k) {
  if (!(k >= 0.0 && k < 1.0)) throw DomainError("jacobi_elliptic: modulus must lie in [0, 1)");
  if (k == 0.0) return {std::sin(u), std::cos(u), 1.0};
  // Descending AGM (Abramowitz & Stegun 16.4).
  constexpr int kMax = 64;
  double a[kMax + 1], c[kMax + 1];
  a[0] = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  c[0] = k;
  int n = 0;
  while (n < kMax && std::abs(c[n]) > kEps * a[n]) {
    a[n + 1] = 0.5 * (a[n] + b);
    c[n + 1] = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
  }
  double phi = std::ldexp(a[n] * u, n);
  for (int i = n; i > 0; --i) phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  return {sn, cn, std::sqrt(1.0 - k * k * sn * sn)};
}

RectangleMap rect_corner_images(double r) {
  if (!(r > 0.05 && r < 20.0)) throw DomainError("rect_corner_images: aspect ratio must lie in (0.05, 20)");
  // K(k')/K(k) = AGM(1, k') / AGM(1, k) decreases from +inf to 0 as k runs
  // over (0, 1); bisect in log k so that very small moduli are resolved.
  auto ratio = [](double logk) {
    const double k = std::exp(logk);
    const double kp = std::sqrt(-std::expm1(2.0 * logk));
    return agm(1.0, kp) / agm(1.0, k);
  };
  double lo = -400.0;
  double hi = -1e-12;
  const double target = 2.0 * r;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(lo))) break;
  }
  RectangleMap m;
  m.k = std::exp(0.5 * (lo + hi));
  const double kp = std::sqrt((1.0 - m.k) * (1.0 + m.k));
  m.K = std::numbers::pi / (2.0 * agm(1.0, kp));
  m.Kp = std::numbers::pi / (2.0 * agm(1.0, m.k));
  m.corners = {-1.0 / m.k, -1.0, 1.0, 1.0 / m.k};
  return m;
}

double rect_boundary_image(const RectangleMap& map, double s) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("rect_boundary_image: fraction must lie in [0, 1)");
  // Rectangle [-K, K] x [0, K'], traversed counterclockwise from the top-left corner:
  // left side down, bottom left-to-right, right side up, top right-to-left.
  const double K = map.K, Kp = map.Kp;
  const double perimeter = 4.0 * K + 2.0 * Kp;
  double t = s * perimeter;
  const double kp = std::sqrt((1.0 - map.k) * (1.0 + map.k));
  if (t < Kp) {
    // -K + i(Kp - t): sn(-K + iv) = -1 / dn(v, k').
    return -1.0 / jacobi_elliptic(Kp - t, kp).dn;
  }
  t -= Kp;
  if (t < 2.0 * K) return jacobi_elliptic(t - K, map.k).sn;
  t -= 2.0 * K;
  if (t < Kp) return 1.0 / jacobi_elliptic(t, kp).dn;
  t -= Kp;
  // u + iK' on the top edge, u running from K down to -K: sn = 1 / (k sn(u)).
  const double u = K - t;
  const double sn = jacobi_elliptic(u, map.k).sn;
  if (sn == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (map.k * sn);
}

}  // namespace slepf
