#include "slepf/coulomb.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "slepf/cft_params.hpp"
#include "slepf/errors.hpp"
#include "slepf/quadrature.hpp"
#include "slepf/specfun.hpp"

namespace slepf {

namespace {

void check_range(double kappa) {
  if (!(kappa > 4.0 && kappa < 8.0)) throw UnsupportedError("Coulomb-gas integrals need kappa in (4, 8)");
}

// |1 - rho^2| below this (|kappa - 6| < 0.25 or so) switches to interpolation in kappa.
constexpr double kResonanceWindow = 0.25;
constexpr double kInterpCentre = 6.0;
constexpr double kInterpHalfWidth = 0.5;
constexpr int kInterpNodes = 12;

struct PurePair {
  double adjacent;
  double nested;
};

PurePair pure_pair_direct(double kappa, std::span<const double> x, double tol) {
  const double h = derive_params(kappa).h;
  const double j_adj = coulomb_rectangle(kappa, x, tol);
  // Rotation y = f(x2, x3, x4, x1) with f(t) = -1 / (t - p), p between x1 and x2.
  const double p = 0.5 * (x[0] + x[1]);
  const std::array<double, 4> y{-1.0 / (x[1] - p), -1.0 / (x[2] - p), -1.0 / (x[3] - p), -1.0 / (x[0] - p)};
  double cov = 1.0;
  for (double t : x) cov *= std::pow((t - p) * (t - p), -h);
  const double j_nest = cov * coulomb_rectangle(kappa, y, tol);
  const double rho = coulomb_mixing(kappa);
  const double den = 1.0 - rho * rho;
  return {(j_adj - rho * j_nest) / den, (j_nest - rho * j_adj) / den};
}

PurePair pure_pair(double kappa, std::span<const double> x, double tol) {
  if (std::abs(kappa - kInterpCentre) >= kResonanceWindow) return pure_pair_direct(kappa, x, tol);
  // Chebyshev nodes of the first kind and barycentric interpolation.
  double num_a = 0.0, num_n = 0.0, den = 0.0;
  for (int j = 0; j < kInterpNodes; ++j) {
    const double theta = (2.0 * j + 1.0) * std::numbers::pi / (2.0 * kInterpNodes);
    const double node = kInterpCentre + kInterpHalfWidth * std::cos(theta);
    const auto v = pure_pair_direct(node, x, tol);
    if (node == kappa) return v;
    const double w = ((j % 2 == 0) ? 1.0 : -1.0) * std::sin(theta) / (kappa - node);
    num_a += w * v.adjacent;
    num_n += w * v.nested;
    den += w;
  }
  return {num_a / den, num_n / den};
}

}  // namespace

double coulomb_normalization(double kappa) {
  check_range(kappa);
  const double g = gamma_fn(1.0 - 4.0 / kappa);
  return gamma_fn(2.0 - 8.0 / kappa) / (g * g);
}

double coulomb_mixing(double kappa) {
  check_range(kappa);
  return -1.0 / (2.0 * std::cos(4.0 * std::numbers::pi / kappa));
}

double coulomb_n1(double kappa, double x1, double x2, double tol) {
  check_range(kappa);
  if (!(x1 < x2)) throw DomainError("coulomb_n1: need x1 < x2");
  const double e = -4.0 / kappa;
  quad::Options opt;
  opt.rel_tol = tol;
  opt.max_levels = 12;
  const auto r = quad::tanh_sinh([e](double, double dl, double dr) { return std::pow(dl * dr, e); }, x1, x2, opt);
  return coulomb_normalization(kappa) * std::pow(x2 - x1, 2.0 / kappa) * r.value;
}

double coulomb_rectangle(double kappa, std::span<const double> pts, double tol) {
  check_range(kappa);
  if (pts.size() != 4) throw DomainError("coulomb_rectangle: need four points");
  check_ordered(pts);
  const double e = -4.0 / kappa;
  const double s = 8.0 / kappa;
  const double len1 = pts[1] - pts[0];
  const double gap = pts[2] - pts[1];
  const double len2 = pts[3] - pts[2];
  quad::Options inner_opt;
  inner_opt.rel_tol = 0.1 * tol;
  inner_opt.max_levels = 12;
  quad::Options outer_opt;
  outer_opt.rel_tol = tol;
  outer_opt.max_levels = 12;
  // All distances are assembled from endpoint offsets, never by subtracting coordinates.
  auto outer = [&](double, double l1, double r1) {
    const double a = e * (std::log(l1) + std::log(r1) + std::log(r1 + gap) + std::log(r1 + gap + len2));
    auto inner = [&](double, double l2, double r2) {
      const double b = e * (std::log(l2) + std::log(r2) + std::log(l2 + gap) + std::log(l2 + gap + len1)) +
                       s * std::log(r1 + gap + l2);
      return std::exp(b);
    };
    return std::exp(a) * quad::tanh_sinh(inner, pts[2], pts[3], inner_opt).value;
  };
  const double integral = quad::tanh_sinh(outer, pts[0], pts[1], outer_opt).value;
  double prefactor = 1.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) prefactor *= std::pow(pts[j] - pts[i], 2.0 / kappa);
  }
  const double n = coulomb_normalization(kappa);
  return n * n * prefactor * integral;
}

PartitionFnEstimate coulomb_n2(double kappa, const LinkPattern& alpha, std::span<const double> pts, double tol) {
  check_range(kappa);
  if (alpha.n_links() != 2 || pts.size() != 4) throw DomainError("coulomb_n2: need a pattern of LP_2 and four points");
  check_ordered(pts);
  const auto v = pure_pair(kappa, pts, tol);
  PartitionFnEstimate est;
  est.method = Method::coulomb;
  est.value = alpha.contains(1, 2) ? v.adjacent : v.nested;
  double amp = 1.0;
  if (std::abs(kappa - kInterpCentre) >= kResonanceWindow) {
    const double rho = coulomb_mixing(kappa);
    amp = (1.0 + std::abs(rho)) / std::abs(1.0 - rho * rho);
  } else {
    amp = 20.0;
  }
  est.abs_error = amp * tol * (std::abs(v.adjacent) + std::abs(v.nested));
  return est;
}

}  // namespace slepf
