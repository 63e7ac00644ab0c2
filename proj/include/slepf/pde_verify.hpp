#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "slepf/linkpat.hpp"

namespace slepf {

/// A partition-function evaluator on increasing boundary points.
using Evaluator = std::function<double(std::span<const double>)>;

struct ResidualReport {
  double residual = 0.0;       // extrapolated operator value relative to the largest term
  double raw = 0.0;            // extrapolated operator value
  double max_term = 0.0;
  std::vector<double> steps;   // step sizes used
  std::vector<double> levels;  // operator value per step
};

/// Second-order null-state operator in x_i (1-based) applied to f by central
/// differences at step, step/2, step/4 with Richardson extrapolation.
ResidualReport pde_residual(const Evaluator& f, double kappa, int i, std::span<const double> pts, double step);

/// Default step: 1e-3 times the smallest gap.
double default_step(std::span<const double> pts);

/// f(x) = (a x + b) / (c x + d) with a d - b c = 1.
struct MobiusMap {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  double operator()(double x) const { return (a * x + b) / (c * x + d); }
  double derivative(double x) const {
    const double q = c * x + d;
    return 1.0 / (q * q);
  }
};

/// Relative discrepancy |Z(x) - prod f'(x_i)^h Z(f(x))| / |Z(x)|.
double mobius_check(const Evaluator& f, double kappa, const MobiusMap& map, std::span<const double> pts);

/// Random orientation-preserving map keeping all of `pts` on one side of its pole.
MobiusMap random_mobius(std::span<const double> pts, std::uint64_t seed, std::uint64_t index);

struct AsyEstimate {
  double limit = 0.0;
  std::vector<double> ratios;  // f / delta^{-2h} per delta
  bool conclusive = true;
};

/// Limit of f / delta^{-2h} as x_j, x_{j+1} -> xi symmetrically, delta = x_{j+1} - x_j.
/// `others` are the remaining 2N - 2 points in increasing order; the pair is
/// inserted between others[j-2] and others[j-1]. Aitken extrapolation over
/// three geometric deltas.
AsyEstimate asy_check(const Evaluator& f, double kappa, int j, double xi, std::span<const double> others,
                      std::span<const double> deltas);

struct MartingaleStat {
  double m0 = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double statistic = 0.0;
  long truncated = 0;  // paths stopped before T
};

/// M_t = prod_{i != j} g_t'(x_i)^h f(g_t(x) with W_t in slot j) along chordal
/// SLE_kappa from x_j to infinity, stopped at T or once a tracked point comes
/// within `localize` times the smallest initial gap of W. The discrete Ito sum
/// of dM/dW against the driving increments (mean zero) is subtracted as a
/// control variate; reports (mean - M_0) / SE over M paths. dt caps the step.
MartingaleStat martingale_check(double kappa, const Evaluator& f, std::span<const double> pts, int j, double T,
                                long paths, std::uint64_t seed, double dt = 5e-5, double localize = 0.05);

/// One named numeric check inside a verification suite.
struct CheckEntry {
  std::string label;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SuiteReport {
  std::string suite;
  double kappa = 0.0;
  std::vector<CheckEntry> entries;
  bool passed() const;
};

/// Named suites: pde, cov, asy, bounds, martingale over the exact evaluators,
/// fusion (fused solution, limits, constants) and coulomb (integral oracles).
SuiteReport run_suite(const std::string& suite, double kappa, std::uint64_t seed);

}  // namespace slepf
