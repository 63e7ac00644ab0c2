#pragma once

#include <span>

#include "slepf/exact_pf.hpp"
#include "slepf/linkpat.hpp"

namespace slepf {

/// Gamma(2 - 8/k) / Gamma(1 - 4/k)^2, the normalization of one screening charge.
double coulomb_normalization(double kappa);

/// One screening charge on [x1, x2]; kappa in (4, 8).
double coulomb_n1(double kappa, double x1, double x2, double tol = 1e-13);

/// Normalized two-charge integral with w1 on [x1, x2] and w2 on [x3, x4] of
///   prod_{i<j} |x_j - x_i|^{2/k} prod_{r,i} |w_r - x_i|^{-4/k} |w2 - w1|^{8/k}.
/// It equals Z_{12,34} + rho Z_{14,23} with rho = coulomb_mixing(kappa).
double coulomb_rectangle(double kappa, std::span<const double> pts, double tol = 1e-11);

/// rho = B(1 - 4/k, 8/k - 1) / B(1 - 4/k, 1 - 4/k) = -1 / (2 cos(4 pi / k)).
double coulomb_mixing(double kappa);

/// Z_alpha for alpha in LP_2 from the rectangle integral and its image under
/// the Moebius rotation x2 -> x3 -> x4 -> x1; near kappa = 6, where rho = 1,
/// by interpolation in kappa.
PartitionFnEstimate coulomb_n2(double kappa, const LinkPattern& alpha, std::span<const double> pts,
                               double tol = 1e-11);

}  // namespace slepf
