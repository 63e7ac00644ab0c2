#include "slepf/cft_params.hpp"

#include <cmath>
#include <string>

#include "slepf/errors.hpp"

namespace slepf {

KappaParams derive_params(double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    throw DomainError("kappa must be positive and finite, got " + std::to_string(kappa));
  }
  KappaParams p;
  p.kappa = kappa;
  p.h = (6.0 - kappa) / (2.0 * kappa);
  p.c = (3.0 * kappa - 8.0) * (6.0 - kappa) / (2.0 * kappa);
  p.h13 = kac_weight(kappa, 3);
  return p;
}

double kac_weight(double kappa, int s) {
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    throw DomainError("kappa must be positive and finite");
  }
  if (s < 1) throw DomainError("Kac index s must be >= 1");
  const double sm1 = s - 1;
  return sm1 * (2.0 * (s + 1) - kappa) / (2.0 * kappa);
}

}  // namespace slepf
