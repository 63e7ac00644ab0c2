#include "slepf/exact_pf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "slepf/cft_params.hpp"
#include "slepf/errors.hpp"
#include "slepf/specfun.hpp"

namespace slepf {

std::string to_string(Method m) {
  switch (m) {
    case Method::exact:
      return "exact";
    case Method::mc:
      return "mc";
    case Method::coulomb:
      return "coulomb";
  }
  return "unknown";
}

void check_ordered(std::span<const double> xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) throw DomainError("boundary points must be finite");
    if (i > 0 && !(xs[i - 1] < xs[i])) throw DomainError("boundary points must be strictly increasing");
  }
}

namespace {

void check_kappa(double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0) throw DomainError("kappa must be positive and finite");
  if (kappa >= 8.0) throw UnsupportedError("kappa >= 8: normalization of the four-point functions diverges");
}

// z^{2/k} 2F1(4/k, 1 - 4/k; 8/k; z) / 2F1(..; 1).
double cross_factor(double kappa, double z) {
  const double a = 4.0 / kappa, b = 1.0 - 4.0 / kappa, c = 8.0 / kappa;
  thread_local double cached_kappa = std::numeric_limits<double>::quiet_NaN(), norm = 0.0;
  if (kappa != cached_kappa) {
    norm = gauss_2f1(a, b, c, 1.0);
    cached_kappa = kappa;
  }
  return std::pow(z, 2.0 / kappa) * gauss_2f1(a, b, c, z) / norm;
}

}  // namespace

double z_pair(double kappa, double x1, double x2) {
  if (!std::isfinite(kappa) || kappa <= 0.0) throw DomainError("kappa must be positive and finite");
  if (!(x1 < x2)) throw DomainError("z_pair: need x1 < x2");
  return std::pow(x2 - x1, (kappa - 6.0) / kappa);
}

double z_four(double kappa, const LinkPattern& alpha, std::span<const double> pts) {
  check_kappa(kappa);
  if (alpha.n_links() != 2 || pts.size() != 4) throw DomainError("z_four: need a pattern of LP_2 and four points");
  check_ordered(pts);
  const double x1 = pts[0], x2 = pts[1], x3 = pts[2], x4 = pts[3];
  const double two_h = 2.0 * derive_params(kappa).h;
  if (alpha.contains(1, 2)) {
    const double z = (x4 - x1) * (x3 - x2) / ((x4 - x2) * (x3 - x1));
    return std::pow(x2 - x1, -two_h) * std::pow(x4 - x3, -two_h) * cross_factor(kappa, z);
  }
  const double z = (x2 - x1) * (x4 - x3) / ((x4 - x2) * (x3 - x1));
  return std::pow(x4 - x1, -two_h) * std::pow(x3 - x2, -two_h) * cross_factor(kappa, z);
}

double z_exact(double kappa, const LinkPattern& alpha, std::span<const double> pts) {
  if (static_cast<int>(pts.size()) != alpha.n_points()) throw DomainError("point count does not match pattern");
  switch (alpha.n_links()) {
    case 0:
      return z_empty();
    case 1:
      return z_pair(kappa, pts[0], pts[1]);
    case 2:
      return z_four(kappa, alpha, pts);
    default:
      throw UnsupportedError("no closed form for N >= 3");
  }
}

double c_kappa(double kappa) {
  if (!(kappa > 0.0 && kappa <= 8.0)) throw DomainError("c_kappa: kappa must lie in (0, 8]");
  if (kappa == 8.0) return 0.0;
  // 1 / 2F1(4/k, 1 - 4/k; 8/k; 1) written with Gamma functions; Gamma(8/k - 1) has
  // a pole at kappa = 8 and the formula tends to 0 there.
  return gamma_fn(4.0 / kappa) * gamma_fn(12.0 / kappa - 1.0) / (gamma_fn(8.0 / kappa) * gamma_fn(8.0 / kappa - 1.0));
}

double z_total(double kappa, std::span<const double> pts) {
  check_ordered(pts);
  if (pts.size() % 2 != 0) throw DomainError("z_total: need an even number of points");
  const int n = static_cast<int>(pts.size() / 2);
  if (n > 2) throw UnsupportedError("z_total: N >= 3 requires the Monte-Carlo evaluator");
  double s = 0.0;
  for (const auto& alpha : enumerate(n)) s += z_exact(kappa, alpha, pts);
  return s;
}

double pfaffian_form(std::span<const double> pts) {
  check_ordered(pts);
  if (pts.size() % 2 != 0) throw DomainError("pfaffian_form: need an even number of points");
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      a(i, j) = 1.0 / (pts[j] - pts[i]);
      a(j, i) = -a(i, j);
    }
  }
  return pfaffian(a);
}

double bound_b(double kappa, const LinkPattern& alpha, std::span<const double> pts) {
  const double two_h = 2.0 * derive_params(kappa).h;
  double b = 1.0;
  for (const auto& l : alpha.links()) b *= std::pow(std::abs(pts[l.b - 1] - pts[l.a - 1]), -two_h);
  return b;
}

double malek_bound(double kappa, std::span<const double> pts) {
  const double h = derive_params(kappa).h;
  double b = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i) m = std::min(m, std::abs(pts[i] - pts[j]));
    }
    b *= std::pow(m, -h);
  }
  return b;
}

double connectivity_ratio(double kappa, const LinkPattern& alpha, std::span<const double> pts) {
  return z_exact(kappa, alpha, pts) / z_total(kappa, pts);
}

double transport_polygon(double kappa, const LinkPattern& alpha, std::span<const double> images,
                         std::optional<std::span<const double>> derivative_factors) {
  check_ordered(images);
  if (!derivative_factors) return connectivity_ratio(kappa, alpha, images);
  const auto& f = *derivative_factors;
  if (f.size() != images.size()) throw DomainError("transport_polygon: one derivative factor per point");
  const double h = derive_params(kappa).h;
  double cov = 1.0;
  for (double d : f) cov *= std::pow(std::abs(d), h);
  return cov * z_exact(kappa, alpha, images);
}

}  // namespace slepf
