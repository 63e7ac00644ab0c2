#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "slepf/cft_params.hpp"
#include "slepf/errors.hpp"
#include "slepf/exact_pf.hpp"

using namespace slepf;

namespace {

const auto kA = LinkPattern::parse("1-2,3-4");
const auto kB = LinkPattern::parse("1-4,2-3");

// Cardy: Gamma(2/3) / Gamma(1/3)^2 * int_0^z t^{-2/3} (1 - t)^{-2/3} dt, with t = u^3.
double cardy(double z) {
  const int n = 20000;
  const double top = std::cbrt(z), h = top / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * std::pow(1.0 - u * u * u, -2.0 / 3.0);
  }
  s *= h;  // Simpson weight h / 3 times the Jacobian 3
  return std::tgamma(2.0 / 3.0) / (std::tgamma(1.0 / 3.0) * std::tgamma(1.0 / 3.0)) * s;
}

// 1 / 2F1(4/k, 1 - 4/k; 8/k; 1) by direct summation of the series at z = 1.
double c_kappa_series(double kappa) {
  const double a = 4.0 / kappa, b = 1.0 - 4.0 / kappa, c = 8.0 / kappa;
  long double term = 1.0L, sum = 1.0L;
  const int n_max = 4000000;
  for (int n = 0; n < n_max; ++n) {
    term *= (a + n) * static_cast<long double>(b + n) / ((c + n) * (n + 1.0L));
    sum += term;
  }
  // terms decay like n^{a + b - c - 1}; integrate the tail
  const long double e = c - a - b;
  sum += term * n_max / e;
  return static_cast<double>(1.0L / sum);
}

std::array<double, 4> random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 2.0);
  std::array<double, 4> x{};
  x[0] = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
  for (int i = 1; i < 4; ++i) x[i] = x[i - 1] + u(rng);
  return x;
}

}  // namespace

TEST_CASE("pair function") {
  CHECK(z_pair(3.0, 1.0, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(z_pair(6.0, -2.0, 5.0) == 1.0);
  CHECK(z_pair(2.0, 0.0, 4.0) == doctest::Approx(1.0 / 16.0));
  CHECK_THROWS_AS(z_pair(3.0, 1.0, 1.0), DomainError);
  const std::vector<double> two = {0.0, 2.0};
  CHECK(z_exact(4.0, LinkPattern::parse("1-2"), two) == doctest::Approx(std::pow(2.0, -0.5)));
  CHECK(z_exact(4.0, LinkPattern(), std::vector<double>{}) == 1.0);
}

TEST_CASE("four-point functions at kappa = 4") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto x = random_config(rng);
    const double x12 = x[1] - x[0], x13 = x[2] - x[0], x14 = x[3] - x[0];
    const double x23 = x[2] - x[1], x24 = x[3] - x[1], x34 = x[3] - x[2];
    CHECK(z_four(4.0, kA, x) == doctest::Approx(std::sqrt(x14 * x23 / (x12 * x34 * x13 * x24))).epsilon(1e-12));
    CHECK(z_four(4.0, kB, x) == doctest::Approx(std::sqrt(x12 * x34 / (x14 * x23 * x13 * x24))).epsilon(1e-12));
  }
}

TEST_CASE("Ising pfaffian identity") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_config(rng);
    const double x12 = x[1] - x[0], x13 = x[2] - x[0], x14 = x[3] - x[0];
    const double x23 = x[2] - x[1], x24 = x[3] - x[1], x34 = x[3] - x[2];
    const double pf = 1.0 / (x12 * x34) - 1.0 / (x13 * x24) + 1.0 / (x14 * x23);
    CHECK(pfaffian_form(x) == doctest::Approx(pf).epsilon(1e-13));
    CHECK(z_total(3.0, x) == doctest::Approx(pf).epsilon(1e-10));
  }
  CHECK(pfaffian_form(std::vector<double>{1.0, 3.0}) == doctest::Approx(0.5));
}

TEST_CASE("percolation crossing formula") {
  for (double z : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    // points 0 < z < 1 < infinity approximated by a far fourth point
    const std::vector<double> x = {0.0, 1.0 - z, 1.0, 1e9};
    // pattern 1-4,2-3 uses cross-ratio (x2 - x1)(x4 - x3) / ((x4 - x2)(x3 - x1)) -> 1 - z
    CHECK(z_four(6.0, kB, x) == doctest::Approx(cardy(1.0 - z)).epsilon(1e-7));
    CHECK(z_four(6.0, kA, x) == doctest::Approx(cardy(z)).epsilon(1e-7));
    CHECK(z_total(6.0, x) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("covariance under affine maps") {
  std::mt19937_64 rng(3);
  for (double kappa : {2.0, 3.0, 5.0, 7.0}) {
    const double h = derive_params(kappa).h;
    const auto x = random_config(rng);
    std::array<double, 4> y{};
    for (int i = 0; i < 4; ++i) y[i] = 2.5 * x[i] - 1.0;
    for (const auto& a : {kA, kB}) {
      CHECK(z_four(kappa, a, y) == doctest::Approx(std::pow(2.5, -4.0 * h) * z_four(kappa, a, x)).epsilon(1e-12));
      const std::vector<double> f(4, 2.5);
      CHECK(transport_polygon(kappa, a, y, f) == doctest::Approx(z_four(kappa, a, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("merging two points of a link recovers the pair function") {
  for (double kappa : {2.0, 3.0, 4.0}) {
    const double two_h = 2.0 * derive_params(kappa).h;
    const double e = 1e-7;
    const std::vector<double> x = {0.0, e, 1.0, 3.0};
    CHECK(z_four(kappa, kA, x) * std::pow(e, two_h) == doctest::Approx(z_pair(kappa, 1.0, 3.0)).epsilon(1e-4));
    CHECK(z_four(kappa, kB, x) * std::pow(e, two_h) < 1e-3 * z_pair(kappa, 1.0, 3.0));
  }
}

TEST_CASE("C(kappa)") {
  CHECK(c_kappa(4.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c_kappa(8.0) == 0.0);
  CHECK(std::abs(c_kappa(8.0 - 1e-9)) < 1e-8);
  for (double k : {1.5, 3.0, 5.0, 6.0, 7.0}) CHECK(c_kappa(k) == doctest::Approx(c_kappa_series(k)).epsilon(1e-8));
  CHECK(c_kappa(6.0) == doctest::Approx(std::tgamma(2.0 / 3.0) * std::tgamma(1.0) /
                                        (std::tgamma(4.0 / 3.0) * std::tgamma(1.0 / 3.0))));
  for (int i = 1; i <= 20; ++i) {
    CHECK(c_kappa(4.0 * i / 21.0) > 1.0);
    CHECK(c_kappa(4.0 + 4.0 * i / 21.0) < 1.0);
    CHECK(c_kappa(4.0 + 4.0 * i / 21.0) > 0.0);
  }
  CHECK_THROWS_AS(c_kappa(0.0), DomainError);
}

TEST_CASE("bounds") {
  std::mt19937_64 rng(4);
  for (double kappa : {3.0, 4.0, 6.0}) {
    for (int i = 0; i < 100; ++i) {
      const auto x = random_config(rng);
      for (const auto& a : {kA, kB}) {
        const double z = z_four(kappa, a, x);
        CHECK(z > 0.0);
        CHECK(z <= bound_b(kappa, a, x));
        CHECK(z <= malek_bound(kappa, x) * (1.0 + 1e-12));
      }
    }
  }
  const std::vector<double> x = {0.0, 1.0, 3.0, 4.0};
  CHECK(bound_b(3.0, kA, x) == doctest::Approx(1.0));
  CHECK(bound_b(3.0, kB, x) == doctest::Approx(1.0 / 8.0));
  CHECK(malek_bound(3.0, x) == doctest::Approx(1.0));
}

TEST_CASE("connectivity ratios") {
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
  CHECK(connectivity_ratio(3.0, kA, x) + connectivity_ratio(3.0, kB, x) == doctest::Approx(1.0));
  // cross-ratio 1/2 is self-dual
  const double s = std::sqrt(2.0);
  const std::vector<double> sq2 = {-s - 1.0, 1.0 - s, s - 1.0, s + 1.0};
  CHECK(connectivity_ratio(3.0, kA, sq2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(transport_polygon(3.0, kA, sq2) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("input validation") {
  const std::vector<double> bad = {0.0, 2.0, 1.0, 3.0};
  CHECK_THROWS_AS(z_four(3.0, kA, bad), DomainError);
  CHECK_THROWS_AS(z_four(8.0, kA, std::vector<double>{0, 1, 2, 3}), UnsupportedError);
  CHECK_THROWS_AS(z_exact(3.0, LinkPattern::parse("1-2,3-4,5-6"), std::vector<double>{0, 1, 2, 3, 4, 5}),
                  UnsupportedError);
  CHECK_THROWS_AS(z_total(3.0, std::vector<double>{0, 1, 2}), DomainError);
  CHECK_THROWS_AS(check_ordered(std::vector<double>{0.0, NAN}), DomainError);
}
