#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "slepf/cft_params.hpp"
#include "slepf/errors.hpp"
#include "slepf/exact_pf.hpp"
#include "slepf/fusion.hpp"

using namespace slepf;

TEST_CASE("q-integers") {
  for (double k : {2.5, 3.0, 4.5, 6.0, 7.3}) {
    const double th = 4.0 * std::numbers::pi / k;
    for (int m = 0; m <= 7; ++m) {
      CHECK(q_integer(m, k) == doctest::Approx(std::sin(m * th) / std::sin(th)).epsilon(1e-12).scale(1.0));
    }
    CHECK(q_factorial(3, k) == doctest::Approx(q_integer(2, k) * q_integer(3, k)));
  }
  // sin(4 pi / kappa) = 0 at kappa = 4: limit m (-1)^{m+1}
  CHECK(q_integer(3, 4.0) == doctest::Approx(3.0));
  CHECK(q_integer(2, 4.0) == doctest::Approx(-2.0));
  CHECK(q_factorial(0, 3.0) == 1.0);
  CHECK_THROWS_AS(q_integer(-1, 3.0), DomainError);
}

TEST_CASE("structure constants") {
  for (double k : {2.5, 3.7, 5.0, 7.0}) {
    CHECK(b_const(2, 2, 3, k) == 1.0);
    CHECK(nu_const(2, 2, 1, k) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(nu_const(2, 2, 3, k) == doctest::Approx(1.0).epsilon(1e-14));
  }
  const double g13 = std::tgamma(1.0 / 3.0), g23 = std::tgamma(2.0 / 3.0);
  CHECK(b_const(2, 2, 1, 6.0) == doctest::Approx(g13 * g13 / g23).epsilon(1e-13));
  CHECK(b_const(2, 2, 1, 6.0) == doctest::Approx(5.2999).epsilon(1e-4));
  // m = 1 product written out for generic kappa
  const double k = 3.7, e = 4.0 / k;
  CHECK(b_const(2, 2, 1, k) == doctest::Approx(std::tgamma(1.0 - e) * std::tgamma(1.0 - e) / std::tgamma(2.0 - 2.0 * e)));
  CHECK_THROWS_AS(b_const(2, 2, 2, 3.0), DomainError);
  CHECK_THROWS_AS(b_const(2, 2, 5, 3.0), DomainError);
  // [2] = 2 cos(4 pi / kappa) vanishes at kappa = 8/3
  CHECK_THROWS_AS(nu_const(2, 2, 1, 8.0 / 3.0), ResonanceError);
  // [3] = 0 at kappa = 3 and 6
  CHECK_THROWS_AS(nu_const(2, 2, 3, 3.0), ResonanceError);
  CHECK_THROWS_AS(nu_const(2, 2, 3, 6.0), ResonanceError);
  CHECK_THROWS_AS(b_const(2, 2, 1, 4.0), ResonanceError);
}

TEST_CASE("fused function is the limit of the nested four-point function") {
  for (double k : {2.0, 3.0, 5.0, 6.0}) {
    const double xi = 0.3, x3 = 1.0, x4 = 2.5;
    const double d = 1e-7;
    const std::vector<double> pts = {xi - 0.5 * d, xi + 0.5 * d, x3, x4};
    const double direct = z_four(k, LinkPattern::parse("1-4,2-3"), pts) / std::pow(d, 2.0 / k);
    CHECK(fused_z4(k, xi, x3, x4) == doctest::Approx(direct).epsilon(1e-5));
    const auto lim = numeric_fusion_limit(k, xi, x3, x4);
    CHECK(lim.value == doctest::Approx(fused_z4(k, xi, x3, x4)).epsilon(1e-4));
    CHECK(lim.samples.size() == lim.deltas.size());
    const double h13 = derive_params(k).h13;
    CHECK(fused_z4(k, xi, x3, x4) == doctest::Approx(c_kappa(k) * std::pow(x4 - xi, -h13) * std::pow(x3 - xi, -h13) *
                                                    std::pow(x4 - x3, 2.0 / k)));
  }
  CHECK_THROWS_AS(fused_z4(3.0, 1.0, 0.5, 2.0), DomainError);
}

TEST_CASE("fused PDE system") {
  for (double k : {2.0, 3.0, 5.0, 6.0}) {
    const auto r = fused_pde_residual(k, 0.0, 1.0, 2.2, 1e-3);
    CHECK(r.x3 < 1e-4);
    CHECK(r.x4 < 1e-4);
    CHECK(r.xi < 1e-4);
    CHECK(r.max() < 1e-4);
  }
  CHECK_THROWS_AS(fused_pde_residual(3.0, 0.0, 1.0, 2.2, 0.5), RefinementError);
}

TEST_CASE("operator product expansion exponents") {
  for (double k : {3.0, 5.0, 6.0}) {
    const auto fit = ope_fit(k, 0.0, 1.0, 2.0);
    const auto p = derive_params(k);
    CHECK(fit.leading_exponent == doctest::Approx(-2.0 * p.h).scale(1.0).epsilon(1e-2));
    CHECK(std::abs(fit.subleading_exponent - 2.0 / k) < 1e-2);
    // leading coefficient: Z_{12,34} delta^{2h} -> z_pair(x3, x4)
    CHECK(fit.leading_coefficient == doctest::Approx(z_pair(k, 1.0, 2.0)).epsilon(1e-3));
  }
}
