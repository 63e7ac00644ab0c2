#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "slepf/specfun.hpp"

using namespace slepf;

namespace {

// Direct power series in long double; converges for z < 1 given enough terms.
double series_oracle(double a, double b, double c, double z) {
  long double term = 1.0L, sum = 1.0L;
  for (int n = 0; n < 200000; ++n) {
    term *= (a + n) * static_cast<long double>(b + n) / ((c + n) * (n + 1.0L)) * z;
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum) && n > 10) break;
  }
  return static_cast<double>(sum);
}

// K(k) = pi/2 sum ((2n)! / (4^n n!^2))^2 k^{2n}.
double k_series(double k) {
  long double coef = 1.0L, sum = 1.0L, k2n = 1.0L;
  for (int n = 1; n < 5000; ++n) {
    coef *= (2.0L * n - 1.0L) / (2.0L * n);
    k2n *= static_cast<long double>(k) * k;
    const long double t = coef * coef * k2n;
    sum += t;
    if (t < 1e-22L * sum) break;
  }
  return static_cast<double>(std::numbers::pi_v<long double> / 2.0L * sum);
}

}  // namespace

TEST_CASE("gamma and beta") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-15));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-15));
  CHECK(gamma_fn(-0.5) == doctest::Approx(-2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(lgamma_fn(10.0) == doctest::Approx(std::log(362880.0)).epsilon(1e-15));
  for (int i = 1; i <= 9; ++i) {
    const double a = 0.1 * i;
    CHECK(beta_fn(a, a) == doctest::Approx(gamma_fn(a) * gamma_fn(a) / gamma_fn(2.0 * a)).epsilon(1e-13));
  }
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("2F1 special values") {
  CHECK(gauss_2f1(0.3, 0.7, 1.9, 0.0) == 1.0);
  CHECK(gauss_2f1(1.0, 0.0, 2.0, 0.73) == 1.0);
  // terminating: 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2 / (c(c+1))
  const double b = 0.4, c = 1.3, z = 0.81;
  CHECK(gauss_2f1(-2.0, b, c, z) == doctest::Approx(1.0 - 2.0 * b * z / c + b * (b + 1) * z * z / (c * (c + 1))));
  // 2F1(1, 1; 2; z) = -log(1 - z) / z
  for (double x : {0.1, 0.5, 0.7, 0.95}) {
    CHECK(gauss_2f1(1.0, 1.0, 2.0, x) == doctest::Approx(-std::log1p(-x) / x).epsilon(1e-13));
  }
  // 2F1(1/2, 1/2; 3/2; z^2) = asin(z) / z
  for (double x : {0.3, 0.8, 0.99}) {
    CHECK(gauss_2f1(0.5, 0.5, 1.5, x * x) == doctest::Approx(std::asin(x) / x).epsilon(1e-13));
  }
}

TEST_CASE("2F1 Gauss sum at z = 1") {
  for (double k : {1.0, 2.5, 3.0, 4.5, 6.0, 7.5}) {
    const double a = 4.0 / k, b = 1.0 - 4.0 / k, c = 8.0 / k;
    const double expected = std::tgamma(8.0 / k) * std::tgamma(8.0 / k - 1.0) /
                            (std::tgamma(4.0 / k) * std::tgamma(12.0 / k - 1.0));
    CHECK(gauss_2f1(a, b, c, 1.0) == doctest::Approx(expected).epsilon(1e-13));
  }
  CHECK(std::isinf(gauss_2f1(0.5, 0.5, 1.0, 1.0)));
}

TEST_CASE("2F1 against the long-double series on all branches") {
  struct P {
    double a, b, c;
  };
  // generic; c - a - b near an integer (ODE branch); SLE parameter sets
  const P params[] = {{0.3, 0.7, 1.9}, {1.2, -0.4, 0.6}, {0.5, 0.5, 1.0}, {0.25, 0.75, 2.005},
                      {4.0 / 3.0, -1.0 / 3.0, 8.0 / 3.0}, {0.8, 0.2, 1.6}, {4.0 / 7.0, 3.0 / 7.0, 8.0 / 7.0}};
  for (const auto& p : params) {
    for (double z : {0.05, 0.3, 0.5, 0.51, 0.7, 0.85, 0.93}) {
      CAPTURE(p.a);
      CAPTURE(p.c);
      CAPTURE(z);
      CHECK(gauss_2f1(p.a, p.b, p.c, z) == doctest::Approx(series_oracle(p.a, p.b, p.c, z)).epsilon(1e-12));
    }
  }
}

TEST_CASE("2F1 satisfies the hypergeometric equation") {
  const double a = 0.8, b = 0.2, c = 1.6;
  for (double z : {0.2, 0.6, 0.9}) {
    const double e = 1e-4;
    const double f0 = gauss_2f1(a, b, c, z), fp = gauss_2f1(a, b, c, z + e), fm = gauss_2f1(a, b, c, z - e);
    const double d1 = (fp - fm) / (2 * e), d2 = (fp - 2 * f0 + fm) / (e * e);
    CHECK(std::abs(z * (1 - z) * d2 + (c - (a + b + 1) * z) * d1 - a * b * f0) < 1e-6);
  }
}

TEST_CASE("2F1 domain") {
  CHECK_THROWS_AS(gauss_2f1(0.5, 0.5, 1.0, 1.2), DomainError);
  CHECK_THROWS_AS(gauss_2f1(0.5, 0.5, -1.0, 0.2), DomainError);
}

TEST_CASE("pfaffian") {
  Eigen::Matrix2d two;
  two << 0, 2.5, -2.5, 0;
  CHECK(pfaffian(two) == 2.5);
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  const double v[6] = {1.5, -0.3, 2.0, 0.7, 1.1, -0.9};
  a(0, 1) = v[0], a(0, 2) = v[1], a(0, 3) = v[2], a(1, 2) = v[3], a(1, 3) = v[4], a(2, 3) = v[5];
  Eigen::Matrix4d skew = a - a.transpose();
  CHECK(pfaffian(skew) == doctest::Approx(v[0] * v[5] - v[1] * v[4] + v[2] * v[3]));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  for (int size : {6, 8, 10, 12}) {
    Eigen::MatrixXd m(size, size);
    for (int i = 0; i < size; ++i) {
      for (int j = 0; j < size; ++j) m(i, j) = n01(rng);
    }
    const Eigen::MatrixXd s = m - m.transpose();
    const double pf = pfaffian(s);
    CHECK(pf * pf == doctest::Approx(s.determinant()).epsilon(1e-10));
    CHECK(detail::pfaffian_eliminate(s) == doctest::Approx(detail::pfaffian_expand(s)).epsilon(1e-10));
  }
  Eigen::Matrix3d odd = Eigen::Matrix3d::Zero();
  CHECK_THROWS_AS(pfaffian(odd), DomainError);
  Eigen::Matrix2d sym;
  sym << 0, 1, 1, 0;
  CHECK_THROWS_AS(pfaffian(sym), DomainError);
}

TEST_CASE("elliptic integral and Jacobi functions") {
  for (double k : {0.0, 0.1, 0.5, 0.9, 0.99}) CHECK(ellint_k(k) == doctest::Approx(k_series(k)).epsilon(1e-13));
  for (double k : {0.2, 0.7, 0.95}) {
    const double K = ellint_k(k);
    CHECK(jacobi_elliptic(K, k).sn == doctest::Approx(1.0).epsilon(1e-12));
    for (double u : {0.1, 0.7, 1.3, 2.9}) {
      const auto e = jacobi_elliptic(u, k);
      CHECK(e.sn * e.sn + e.cn * e.cn == doctest::Approx(1.0));
      CHECK(e.dn * e.dn + k * k * e.sn * e.sn == doctest::Approx(1.0));
      const double h = 1e-5;
      const double dsn = (jacobi_elliptic(u + h, k).sn - jacobi_elliptic(u - h, k).sn) / (2 * h);
      CHECK(dsn == doctest::Approx(e.cn * e.dn).epsilon(1e-8));
    }
  }
}

TEST_CASE("rectangle corner images") {
  const auto sq = rect_corner_images(1.0);
  const double k_sq = (std::sqrt(2.0) - 1.0) * (std::sqrt(2.0) - 1.0);
  CHECK(sq.k == doctest::Approx(k_sq).epsilon(1e-12));
  CHECK(sq.corners[0] == doctest::Approx(-5.828427124746).epsilon(1e-11));
  CHECK(sq.corners[3] == doctest::Approx(5.828427124746).epsilon(1e-11));
  const auto& c = sq.corners;
  CHECK(cross_ratio(c[0], c[1], c[2], c[3]) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(k_series(std::sqrt(1 - sq.k * sq.k)) / k_series(sq.k) == doctest::Approx(2.0).epsilon(1e-12));
  const auto half = rect_corner_images(0.5);
  CHECK(half.k == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(half.corners[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
  // tall rectangles: the left edge dominates and the cross-ratio tends to 1
  double prev = 0.0;
  for (double r : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const auto m = rect_corner_images(r);
    const double cr = cross_ratio(m.corners[0], m.corners[1], m.corners[2], m.corners[3]);
    CHECK(cr > prev);
    prev = cr;
  }
  CHECK(1.0 - prev < 1e-6);
  CHECK_THROWS_AS(rect_corner_images(0.01), DomainError);
}

TEST_CASE("rectangle boundary image") {
  const auto m = rect_corner_images(0.5);  // width 2, height 1: perimeter 6
  CHECK(rect_boundary_image(m, 0.0) == doctest::Approx(m.corners[0]));
  CHECK(rect_boundary_image(m, 1.0 / 6.0) == doctest::Approx(-1.0));
  CHECK(rect_boundary_image(m, 3.0 / 6.0) == doctest::Approx(1.0));
  CHECK(rect_boundary_image(m, 4.0 / 6.0) == doctest::Approx(m.corners[3]));
  CHECK(std::abs(rect_boundary_image(m, 2.0 / 6.0)) < 1e-14);
  // counterclockwise order is increasing on the real line until the top edge passes infinity
  double prev = -1e300;
  for (int i = 0; i < 50; ++i) {
    const double s = i / 50.0 * (5.0 / 6.0 - 1e-9);
    const double x = rect_boundary_image(m, s);
    CHECK(x > prev);
    prev = x;
  }
  // top edge: symmetric points map to x and -x beyond the corners
  CHECK(rect_boundary_image(m, 0.75) == doctest::Approx(-rect_boundary_image(m, 10.0 / 6.0 - 0.75)).epsilon(1e-9));
}
