#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "slepf/errors.hpp"
#include "slepf/exact_pf.hpp"
#include "slepf/ising.hpp"
#include "slepf/rng.hpp"
#include "slepf/specfun.hpp"

using namespace slepf;

namespace {

IsingConfig small_config(int w, int h) {
  IsingConfig c;
  c.width = w;
  c.height = h;
  c.beta = beta_critical();
  c.marks = corner_marks(w, h);
  return c;
}

int interior_code(const SpinField& f) {
  int code = 0, bit = 0;
  for (int j = 1; j <= f.height(); ++j) {
    for (int i = 1; i <= f.width(); ++i, ++bit) code |= (f.at(i, j) > 0 ? 1 : 0) << bit;
  }
  return code;
}

// Boltzmann weights of every interior state by enumeration, edges touching the interior.
std::vector<double> exact_distribution(SpinField f, double beta) {
  const int w = f.width(), h = f.height(), n = w * h;
  std::vector<double> p(static_cast<std::size_t>(1 << n));
  double total = 0.0;
  for (int code = 0; code < (1 << n); ++code) {
    for (int b = 0; b < n; ++b) f.at(1 + b % w, 1 + b / w) = (code >> b & 1) ? 1 : -1;
    double e = 0.0;
    for (int j = 1; j <= h; ++j) {
      for (int i = 1; i <= w; ++i) {
        e += f.at(i, j) * (f.at(i + 1, j) + f.at(i, j + 1));
        if (i == 1) e += f.at(i, j) * f.at(0, j);
        if (j == 1) e += f.at(i, j) * f.at(i, 0);
      }
    }
    p[static_cast<std::size_t>(code)] = std::exp(beta * e);
    total += p[static_cast<std::size_t>(code)];
  }
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace

TEST_CASE("lattice geometry") {
  CHECK(beta_critical() == doctest::Approx(0.5 * std::log(1.0 + std::sqrt(2.0))).epsilon(1e-15));
  CHECK(std::sinh(2.0 * beta_critical()) == doctest::Approx(1.0));
  CHECK(ring_length(4, 3) == 18);
  const SpinField f(4, 3);
  std::map<std::pair<int, int>, int> seen;
  for (int k = 0; k < ring_length(4, 3); ++k) {
    const auto s = f.ring_site(k);
    CHECK((s.first == 0 || s.first == 5 || s.second == 0 || s.second == 4));
    ++seen[s];
  }
  CHECK(seen.size() == 18);
  CHECK(f.ring_site(0) == std::pair<int, int>{0, 4});
  CHECK(parse_arcs("corners", 8, 8) == corner_marks(8, 8));
  CHECK(parse_arcs("0,0.5", 8, 8) == std::vector<int>{0, 18});
  CHECK_THROWS_AS(parse_arcs("0,x", 8, 8), DomainError);
  CHECK_THROWS_AS(fraction_marks(8, 8, {0.1}), DomainError);
}

TEST_CASE("boundary conditions") {
  const auto cfg = small_config(4, 4);
  const auto f = initial_field(cfg);
  CHECK(f.at(0, 2) == 1);   // left arc
  CHECK(f.at(2, 0) == -1);  // bottom arc
  CHECK(f.at(5, 2) == 1);   // right arc
  CHECK(f.at(2, 5) == -1);  // top arc
  CHECK(f.magnetization() == 1.0);
}

TEST_CASE("dynamics sample the Boltzmann distribution") {
  auto cfg = small_config(3, 2);
  const auto start = initial_field(cfg);
  const auto exact = exact_distribution(start, cfg.beta);
  for (auto dyn : {Dynamics::heat_bath, Dynamics::swendsen_wang, Dynamics::hybrid}) {
    auto rng = stream_rng(3, static_cast<std::uint64_t>(dyn));
    auto f = start;
    std::vector<double> hist(exact.size(), 0.0);
    const int n = 60000;
    for (int s = 0; s < 100; ++s) sweep(f, cfg.beta, dyn, rng);
    for (int s = 0; s < n; ++s) {
      sweep(f, cfg.beta, dyn, rng);
      hist[static_cast<std::size_t>(interior_code(f))] += 1.0 / n;
    }
    double tv = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) tv += 0.5 * std::abs(hist[i] - exact[i]);
    CAPTURE(static_cast<int>(dyn));
    CHECK(tv < 0.03);
    // boundary untouched
    CHECK(f.at(2, 0) == start.at(2, 0));
    CHECK(f.at(0, 1) == start.at(0, 1));
  }
}

TEST_CASE("interfaces of frozen configurations") {
  const auto cfg = small_config(6, 6);
  auto f = initial_field(cfg);
  CHECK(trace_interfaces(f, cfg.marks).to_string() == "1-4,2-3");
  for (int j = 1; j <= 6; ++j) {
    for (int i = 1; i <= 6; ++i) f.at(i, j) = -1;
  }
  CHECK(trace_interfaces(f, cfg.marks).to_string() == "1-2,3-4");
  // vertical + column joining left and right arcs
  for (int j = 1; j <= 6; ++j) f.at(3, j) = 1;
  for (int i = 1; i <= 6; ++i) f.at(i, 3) = 1;
  CHECK(trace_interfaces(f, cfg.marks).n_links() == 2);
}

TEST_CASE("mark images of the square") {
  const auto m = mark_images(16, 16, corner_marks(16, 16));
  REQUIRE(m.size() == 4);
  CHECK(cross_ratio(m[0], m[1], m[2], m[3]) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(connectivity_ratio(3.0, LinkPattern::parse("1-2,3-4"), m) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("small crossing experiment") {
  auto cfg = small_config(16, 16);
  cfg.samples = 800;
  cfg.burn_in = 200;
  cfg.sweeps_between = 2;
  const auto r = crossing_experiment(cfg);
  REQUIRE(r.patterns.size() == 2);
  CHECK(r.samples == 800);
  CHECK(r.empirical[0] + r.empirical[1] == doctest::Approx(1.0));
  CHECK(r.predicted[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(std::abs(r.empirical[0] - r.predicted[0]) < 4.0 * r.stderr_binomial[0] + 0.03);
}
