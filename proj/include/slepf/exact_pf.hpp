#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slepf/linkpat.hpp"

namespace slepf {

enum class Method { exact, mc, coulomb };
std::string to_string(Method m);

struct PartitionFnEstimate {
  double value = 0.0;
  double abs_error = 0.0;
  Method method = Method::exact;
};

/// Throws DomainError unless xs is strictly increasing and finite.
void check_ordered(std::span<const double> xs);

inline double z_empty() { return 1.0; }

/// (x2 - x1)^{(kappa - 6) / kappa}.
double z_pair(double kappa, double x1, double x2);

/// Hypergeometric pure partition functions for the two patterns of LP_2.
double z_four(double kappa, const LinkPattern& alpha, std::span<const double> pts);

/// Z_alpha for N <= 2 (empty, pair, or four-point formula).
double z_exact(double kappa, const LinkPattern& alpha, std::span<const double> pts);

/// Gamma(4/k) Gamma(12/k - 1) / (Gamma(8/k) Gamma(8/k - 1)), continued by 0 at kappa = 8.
double c_kappa(double kappa);

/// Sum of Z_alpha over LP_N, N <= 2.
double z_total(double kappa, std::span<const double> pts);

/// Pfaffian of the matrix with entries 1 / (x_j - x_i), i < j.
double pfaffian_form(std::span<const double> pts);

/// prod over links of |x_b - x_a|^{-2h}.
double bound_b(double kappa, const LinkPattern& alpha, std::span<const double> pts);
/// prod over points of (distance to the nearest other point)^{-h}.
double malek_bound(double kappa, std::span<const double> pts);

/// Z_alpha of a polygon given the half-plane images of its marked points.
/// Without derivative factors only the ratio Z_alpha / Z_total is meaningful
/// and is returned; with them, the covariant value prod |f'(x_i)|^h Z_alpha(f(x)).
double transport_polygon(double kappa, const LinkPattern& alpha, std::span<const double> images,
                         std::optional<std::span<const double>> derivative_factors = std::nullopt);

/// Z_alpha / Z_total at the given half-plane points (N <= 2).
double connectivity_ratio(double kappa, const LinkPattern& alpha, std::span<const double> pts);

}  // namespace slepf
