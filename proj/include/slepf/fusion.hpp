#pragma once

#include <vector>

namespace slepf {

/// q-integer [m] = sin(4 pi m / kappa) / sin(4 pi / kappa), m >= 0, evaluated by
/// the recurrence [m + 1] = 2 cos(4 pi / kappa) [m] - [m - 1]; this is also the
/// limiting value where sin(4 pi / kappa) = 0.
double q_integer(int m, double kappa);
/// [m]! = [1][2]...[m], [0]! = 1.
double q_factorial(int m, double kappa);

/// B^{s1,s2}_s; m = (s1 + s2 - s - 1) / 2 must be an integer in [0, min(s1, s2) - 1].
double b_const(int s1, int s2, int s, double kappa);
/// nu^s_{s1,s2}; throws ResonanceError when a q-factorial in the denominator
/// vanishes (or is within 1e-9 of zero).
double nu_const(int s1, int s2, int s, double kappa);

/// C(kappa) (x4 - xi)^{-h13} (x3 - xi)^{-h13} (x4 - x3)^{2/kappa}.
double fused_z4(double kappa, double xi, double x3, double x4);

struct FusionLimit {
  double value = 0.0;
  std::vector<double> deltas;
  std::vector<double> samples;  // Z_{14,23} / delta^{2/kappa}
};

/// lim (x2 - x1)^{-2/kappa} Z_{14,23}(x1, x2, x3, x4) as x1, x2 -> xi, by
/// Richardson extrapolation in delta = x2 - x1.
FusionLimit numeric_fusion_limit(double kappa, double xi, double x3, double x4, double delta0 = 1e-2,
                                 int levels = 5);

struct FusedResidual {
  double x3 = 0.0;  // second-order equation in x3, relative
  double x4 = 0.0;  // second-order equation in x4, relative
  double xi = 0.0;  // third-order equation in xi, relative
  std::vector<double> xi_levels;  // third-order operator value per step (before extrapolation)
  double max() const;
};

/// Residuals of the fused system applied to fused_z4 by central differences at
/// step, step/2, step/4 with Richardson extrapolation.
FusedResidual fused_pde_residual(double kappa, double xi, double x3, double x4, double step);

struct OpeFit {
  double leading_exponent = 0.0;
  double leading_coefficient = 0.0;
  double subleading_exponent = 0.0;
  double subleading_coefficient = 0.0;
};

/// Two-channel fit of Z_{12,34} as x1, x2 -> xi: leading power delta^p with
/// coefficient c, then the exponent q of the next channel from
/// Z delta^{-p} - c ~ b delta^{q - p} + c2 delta^2.
OpeFit ope_fit(double kappa, double xi, double x3, double x4);

}  // namespace slepf
