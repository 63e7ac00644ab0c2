#include "slepf/fusion.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "slepf/cft_params.hpp"
#include "slepf/errors.hpp"
#include "slepf/exact_pf.hpp"
#include "slepf/specfun.hpp"

namespace slepf {

namespace {

constexpr double kResonanceTol = 1e-9;

void check_kappa(double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0) throw DomainError("kappa must be positive and finite");
}

int channel_depth(int s1, int s2, int s) {
  if (s1 < 1 || s2 < 1 || s < 1) throw DomainError("valences must be positive");
  const int twice = s1 + s2 - s - 1;
  if (twice % 2 != 0) throw DomainError("s1 + s2 - s - 1 must be even");
  const int m = twice / 2;
  if (m < 0 || m > std::min(s1, s2) - 1) throw DomainError("channel s out of range for (s1, s2)");
  return m;
}

double checked_gamma(double x) {
  if (x <= 0.0 && std::abs(x - std::round(x)) < kResonanceTol) throw ResonanceError("Gamma pole in structure constant");
  return gamma_fn(x);
}

}  // namespace

double q_integer(int m, double kappa) {
  check_kappa(kappa);
  if (m < 0) throw DomainError("q_integer: m must be nonnegative");
  if (m == 0) return 0.0;
  const double two_cos = 2.0 * std::cos(4.0 * std::numbers::pi / kappa);
  double prev = 0.0, cur = 1.0;
  for (int k = 1; k < m; ++k) {
    const double next = two_cos * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double q_factorial(int m, double kappa) {
  if (m < 0) throw DomainError("q_factorial: m must be nonnegative");
  double f = 1.0;
  for (int k = 2; k <= m; ++k) f *= q_integer(k, kappa);
  return f;
}

double b_const(int s1, int s2, int s, double kappa) {
  check_kappa(kappa);
  const int m = channel_depth(s1, s2, s);
  const double e = 4.0 / kappa;
  double prod = 1.0;
  for (int u = 1; u <= m; ++u) {
    prod *= checked_gamma(1.0 - e * (s1 - u)) * checked_gamma(1.0 - e * (s2 - u)) * checked_gamma(1.0 + e * u) /
            (checked_gamma(1.0 + e) * checked_gamma(2.0 - e * (s1 + s2 - m - u)));
  }
  return prod / std::tgamma(m + 1.0);
}

double nu_const(int s1, int s2, int s, double kappa) {
  check_kappa(kappa);
  const int m = channel_depth(s1, s2, s);
  const double den = q_factorial(s1 - 1 - m, kappa) * q_factorial(s2 - 1 - m, kappa) * q_factorial(s1 + s2 - m - 1, kappa);
  if (std::abs(den) < kResonanceTol) {
    throw ResonanceError("nu_const: vanishing q-factorial at kappa = " + std::to_string(kappa));
  }
  const double num = std::pow(q_integer(2, kappa), m) * q_factorial(s1 - 1, kappa) * q_factorial(s2 - 1, kappa) *
                     q_factorial(s1 + s2 - 2 * m - 1, kappa);
  return num / den;
}

double fused_z4(double kappa, double xi, double x3, double x4) {
  check_kappa(kappa);
  if (!(xi < x3 && x3 < x4)) throw DomainError("fused_z4: need xi < x3 < x4");
  const double h13 = derive_params(kappa).h13;
  return c_kappa(kappa) * std::pow(x4 - xi, -h13) * std::pow(x3 - xi, -h13) * std::pow(x4 - x3, 2.0 / kappa);
}

FusionLimit numeric_fusion_limit(double kappa, double xi, double x3, double x4, double delta0, int levels) {
  if (levels < 2) throw DomainError("numeric_fusion_limit: need at least two levels");
  static const LinkPattern nested = LinkPattern::parse("1-4,2-3");
  FusionLimit out;
  double d = delta0;
  for (int k = 0; k < levels; ++k, d *= 0.5) {
    const double pts[4] = {xi - 0.5 * d, xi + 0.5 * d, x3, x4};
    out.deltas.push_back(d);
    out.samples.push_back(z_four(kappa, nested, pts) * std::pow(d, -2.0 / kappa));
  }
  // Neville-Richardson tableau in powers of delta (halving ratio 2).
  std::vector<double> t = out.samples;
  for (int order = 1; order < levels; ++order) {
    const double f = std::ldexp(1.0, order);
    for (int k = levels - 1; k >= order; --k) t[k] = (f * t[k] - t[k - 1]) / (f - 1.0);
  }
  out.value = t.back();
  return out;
}

double FusedResidual::max() const { return std::max({x3, x4, xi}); }

namespace {

struct FusedTerms {
  double e3, e4, exi;
  double m3, m4, mxi;
};

FusedTerms fused_operators(double kappa, double xi, double x3, double x4, double s) {
  const auto p = derive_params(kappa);
  const double h = p.h, h13 = p.h13;
  auto f = [&](double a, double b, double c) { return fused_z4(kappa, a, b, c); };
  const double f0 = f(xi, x3, x4);
  // Derivatives by central differences.
  const double d_xi = (f(xi + s, x3, x4) - f(xi - s, x3, x4)) / (2 * s);
  const double d_3 = (f(xi, x3 + s, x4) - f(xi, x3 - s, x4)) / (2 * s);
  const double d_4 = (f(xi, x3, x4 + s) - f(xi, x3, x4 - s)) / (2 * s);
  const double dd_3 = (f(xi, x3 + s, x4) - 2 * f0 + f(xi, x3 - s, x4)) / (s * s);
  const double dd_4 = (f(xi, x3, x4 + s) - 2 * f0 + f(xi, x3, x4 - s)) / (s * s);
  const double ddd_xi =
      (f(xi + 2 * s, x3, x4) - 2 * f(xi + s, x3, x4) + 2 * f(xi - s, x3, x4) - f(xi - 2 * s, x3, x4)) / (2 * s * s * s);
  const double dxi_d3 = (f(xi + s, x3 + s, x4) - f(xi + s, x3 - s, x4) - f(xi - s, x3 + s, x4) +
                         f(xi - s, x3 - s, x4)) / (4 * s * s);
  const double dxi_d4 = (f(xi + s, x3, x4 + s) - f(xi + s, x3, x4 - s) - f(xi - s, x3, x4 + s) +
                         f(xi - s, x3, x4 - s)) / (4 * s * s);
  FusedTerms t{};
  // (kappa/2) d_j^2 + sum_{i != j} (2/(x_i - x_j) d_i - 2 h_i/(x_i - x_j)^2).
  {
    const double a = 0.5 * kappa * dd_3;
    const double b = 2.0 / (x4 - x3) * d_4, c = -2.0 * h / ((x4 - x3) * (x4 - x3)) * f0;
    const double d = 2.0 / (xi - x3) * d_xi, e = -2.0 * h13 / ((xi - x3) * (xi - x3)) * f0;
    t.e3 = a + b + c + d + e;
    t.m3 = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d), std::abs(e)});
  }
  {
    const double a = 0.5 * kappa * dd_4;
    const double b = 2.0 / (x3 - x4) * d_3, c = -2.0 * h / ((x3 - x4) * (x3 - x4)) * f0;
    const double d = 2.0 / (xi - x4) * d_xi, e = -2.0 * h13 / ((xi - x4) * (xi - x4)) * f0;
    t.e4 = a + b + c + d + e;
    t.m4 = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d), std::abs(e)});
  }
  {
    // d^3 - (16/k) L_{-2} d_xi + (8 (8 - k)/k^2) L_{-3}, with
    // L_{-n} = sum_{i} ((n - 1) h / (x_i - xi)^n - 1/(x_i - xi)^{n-1} d_i).
    const double r3 = x3 - xi, r4 = x4 - xi;
    const double l2 = h / (r3 * r3) * d_xi - dxi_d3 / r3 + h / (r4 * r4) * d_xi - dxi_d4 / r4;
    const double l3 = 2 * h / (r3 * r3 * r3) * f0 - d_3 / (r3 * r3) + 2 * h / (r4 * r4 * r4) * f0 - d_4 / (r4 * r4);
    const double a = ddd_xi, b = -16.0 / kappa * l2, c = 8.0 * (8.0 - kappa) / (kappa * kappa) * l3;
    t.exi = a + b + c;
    t.mxi = std::max({std::abs(a), std::abs(b), std::abs(c)});
  }
  return t;
}

double richardson3(const double v[3]) {
  const double r1 = (4.0 * v[1] - v[0]) / 3.0;
  const double r2 = (4.0 * v[2] - v[1]) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

}  // namespace

FusedResidual fused_pde_residual(double kappa, double xi, double x3, double x4, double step) {
  if (!(xi < x3 && x3 < x4)) throw DomainError("fused_pde_residual: need xi < x3 < x4");
  if (!(step > 0.0) || std::min(x3 - xi, x4 - x3) < 10.0 * step) {
    throw RefinementError("fused_pde_residual: step too large relative to the separations");
  }
  double e3[3], e4[3], exi[3];
  double m3 = 0, m4 = 0, mxi = 0;
  double s = step;
  for (int k = 0; k < 3; ++k, s *= 0.5) {
    const auto t = fused_operators(kappa, xi, x3, x4, s);
    e3[k] = t.e3;
    e4[k] = t.e4;
    exi[k] = t.exi;
    m3 = std::max(m3, t.m3);
    m4 = std::max(m4, t.m4);
    mxi = std::max(mxi, t.mxi);
  }
  FusedResidual r;
  r.x3 = std::abs(richardson3(e3)) / m3;
  r.x4 = std::abs(richardson3(e4)) / m4;
  r.xi = std::abs(richardson3(exi)) / mxi;
  r.xi_levels.assign(exi, exi + 3);
  return r;
}

namespace {

struct ChannelFit {
  double cost;
  Eigen::Matrix<double, 7, 1> coef;
  Eigen::VectorXd residual;
};

// Least-squares fit of Z ~ c delta^p (1 + c2 delta^2 + c3 delta^3 + c4 delta^4) + b delta^q (1 + b1 delta + b2 delta^2)
// in relative residuals, linear in the coefficients for fixed exponents.
ChannelFit fit_channels(const Eigen::VectorXd& d, const Eigen::VectorXd& z, double p, double q) {
  Eigen::MatrixXd a(d.size(), 7);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double lead = std::pow(d(i), p) / z(i), sub = std::pow(d(i), q) / z(i), d2 = d(i) * d(i);
    a.row(i) << lead, lead * d2, lead * d2 * d(i), lead * d2 * d2, sub, sub * d(i), sub * d2;
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d.size());
  ChannelFit f;
  f.coef = a.colPivHouseholderQr().solve(ones);
  f.residual = a * f.coef - ones;
  f.cost = f.residual.squaredNorm();
  return f;
}

// Variable-projection residual in (p, q - p).
struct ProjectedResidual {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  const Eigen::VectorXd& d;
  const Eigen::VectorXd& z;
  ProjectedResidual(const Eigen::VectorXd& d_, const Eigen::VectorXd& z_) : d(d_), z(z_) {}
  int inputs() const { return 2; }
  int values() const { return static_cast<int>(d.size()); }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    r = fit_channels(d, z, x(0), x(0) + x(1)).residual;
    return 0;
  }
};

}  // namespace

OpeFit ope_fit(double kappa, double xi, double x3, double x4) {
  static const LinkPattern adjacent = LinkPattern::parse("1-2,3-4");
  constexpr int kSamples = 40;
  Eigen::VectorXd d(kSamples), z(kSamples);
  for (int i = 0; i < kSamples; ++i) {
    d(i) = std::pow(10.0, -5.0 + 3.5 * i / (kSamples - 1));
    const double pts[4] = {xi - 0.5 * d(i), xi + 0.5 * d(i), x3, x4};
    z(i) = z_four(kappa, adjacent, pts);
  }
  ProjectedResidual residual(d, z);
  Eigen::NumericalDiff<ProjectedResidual> diff(residual);
  const double p0 = std::log(z(1) / z(0)) / std::log(d(1) / d(0));
  Eigen::Vector2d best(p0, 1.0);
  double best_cost = std::numeric_limits<double>::infinity();
  for (double gap : {0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0}) {
    Eigen::VectorXd x(2);
    x << p0, gap;
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ProjectedResidual>> lm(diff);
    lm.parameters.maxfev = 2000;
    lm.minimize(x);
    if (!std::isfinite(x(0)) || !(x(1) > 1e-3)) continue;
    const auto fit = fit_channels(d, z, x(0), x(0) + x(1));
    // Leading channel must dominate at the smallest separation.
    if (std::abs(fit.coef(0) * std::pow(d(0), x(0))) <= std::abs(fit.coef(4) * std::pow(d(0), x(0) + x(1)))) continue;
    if (fit.cost < best_cost) {
      best_cost = fit.cost;
      best = x;
    }
  }
  const double p = best(0), q = best(0) + best(1);
  const auto fit = fit_channels(d, z, p, q);
  return {p, fit.coef(0), q, fit.coef(4)};
}

}  // namespace slepf
