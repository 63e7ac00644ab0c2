#pragma once

namespace slepf {

/// kappa together with the conformal data derived from it.
///
/// h is the boundary weight h_{1,2} = (6 - kappa) / (2 kappa), c the central
/// charge (3 kappa - 8)(6 - kappa) / (2 kappa), and h13 the weight
/// h_{1,3} = (8 - kappa) / kappa carried by a fused pair of points.
struct KappaParams {
  double kappa;
  double h;
  double c;
  double h13;
};

KappaParams derive_params(double kappa);

/// Kac weight h_{1,s} = (s - 1)(2(s + 1) - kappa) / (2 kappa), s >= 1.
double kac_weight(double kappa, int s);

}  // namespace slepf
