#include <doctest.h>

#include <cmath>

#include "slepf/cft_params.hpp"
#include "slepf/errors.hpp"

using namespace slepf;

TEST_CASE("ising point") {
  const auto p = derive_params(3.0);
  CHECK(p.kappa == 3.0);
  CHECK(p.h == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.c == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.h13 == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("kappa 4 and 6") {
  const auto p4 = derive_params(4.0);
  CHECK(p4.h == doctest::Approx(0.25));
  CHECK(p4.c == doctest::Approx(1.0));
  CHECK(derive_params(6.0).h == 0.0);
  CHECK(derive_params(6.0).c == 0.0);
}

TEST_CASE("kac weights") {
  for (double k : {0.5, 2.0, 3.0, 4.0, 6.0, 7.9}) {
    CHECK(kac_weight(k, 1) == 0.0);
    CHECK(kac_weight(k, 2) == doctest::Approx(derive_params(k).h).epsilon(1e-15));
    CHECK(kac_weight(k, 3) == doctest::Approx(derive_params(k).h13).epsilon(1e-15));
  }
  CHECK(std::abs(kac_weight(6.0, 3) - 1.0 / 3.0) < 1e-15);
  CHECK(kac_weight(3.0, 2) == doctest::Approx(0.5));
  // h_{1,4} from the polynomial in s, written out independently
  const double k = 2.5;
  CHECK(kac_weight(k, 4) == doctest::Approx(3.0 * (10.0 - k) / (2.0 * k)));
}

TEST_CASE("central charge is symmetric under kappa -> 16 / kappa") {
  for (double k : {1.0, 2.0, 3.0, 5.0, 7.0}) {
    CHECK(derive_params(k).c == doctest::Approx(derive_params(16.0 / k).c).epsilon(1e-13));
  }
}

TEST_CASE("domain") {
  CHECK_THROWS_AS(derive_params(0.0), DomainError);
  CHECK_THROWS_AS(derive_params(-1.0), DomainError);
  CHECK_THROWS_AS(derive_params(std::nan("")), DomainError);
  CHECK_THROWS_AS(kac_weight(3.0, 0), DomainError);
}
