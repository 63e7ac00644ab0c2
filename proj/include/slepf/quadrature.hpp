#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "slepf/errors.hpp"

namespace slepf::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;  // difference between the last two refinement levels
  int levels = 0;
  long evaluations = 0;
};

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int min_levels = 3;
  int max_levels = 10;
  double t_max = 6.0;
};

/// Tanh-sinh rule on [a, b]. The integrand is called as f(x, x - a, b - x); the
/// two distances are computed without cancellation, so algebraic endpoint
/// singularities can be evaluated from them directly.
template <typename F>
Result tanh_sinh(F&& f, double a, double b, const Options& opt = {}) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  auto node_sum = [&](double t) {
    const double s = kHalfPi * std::sinh(t);
    const double ch = std::cosh(s);
    const double w = half * kHalfPi * std::cosh(t) / (ch * ch);
    // 1 - tanh(s) for s >= 0 without cancellation.
    const double e = std::exp(-2.0 * std::abs(s));
    const double comp = 2.0 * e / (1.0 + e);
    const double near = half * comp;          // distance to the closer endpoint
    const double far = 2.0 * half - near;      // distance to the other endpoint
    if (near <= 0.0 || w == 0.0) return 0.0;
    if (t == 0.0) return w * f(mid, half, half);
    double x, dl, dr;
    if (s > 0) {
      dr = near;
      dl = far;
      x = b - near;
    } else {
      dl = near;
      dr = far;
      x = a + near;
    }
    return w * f(x, dl, dr);
  };
  Result res;
  double h = 1.0;
  double sum = node_sum(0.0);
  ++res.evaluations;
  for (double t = h; t <= opt.t_max; t += h) {
    sum += node_sum(t) + node_sum(-t);
    res.evaluations += 2;
  }
  double estimate = h * sum;
  for (int level = 1; level <= opt.max_levels; ++level) {
    h *= 0.5;
    double extra = 0.0;
    for (double t = h; t <= opt.t_max; t += 2.0 * h) {
      extra += node_sum(t) + node_sum(-t);
      res.evaluations += 2;
    }
    sum += extra;
    const double next = h * sum;
    res.error = std::abs(next - estimate);
    estimate = next;
    res.levels = level;
    if (level >= opt.min_levels && res.error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(estimate))) {
      res.value = estimate;
      return res;
    }
  }
  res.value = estimate;
  throw ToleranceError("tanh_sinh: no convergence, last change " + std::to_string(res.error) + " on " +
                       std::to_string(estimate));
}

/// Exp-sinh rule on [a, +inf). The integrand is called as f(x, x - a).
template <typename F>
Result exp_sinh(F&& f, double a, const Options& opt = {}) {
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  auto node = [&](double t) {
    const double s = kHalfPi * std::sinh(t);
    if (s > 700.0) return 0.0;
    const double d = std::exp(s);
    if (d == 0.0) return 0.0;
    const double w = kHalfPi * std::cosh(t) * d;
    const double v = f(a + d, d);
    return v == 0.0 ? 0.0 : w * v;
  };
  Result res;
  double h = 1.0;
  double sum = node(0.0);
  ++res.evaluations;
  for (double t = h; t <= opt.t_max; t += h) {
    sum += node(t) + node(-t);
    res.evaluations += 2;
  }
  double estimate = h * sum;
  for (int level = 1; level <= opt.max_levels; ++level) {
    h *= 0.5;
    double extra = 0.0;
    for (double t = h; t <= opt.t_max; t += 2.0 * h) {
      extra += node(t) + node(-t);
      res.evaluations += 2;
    }
    sum += extra;
    const double next = h * sum;
    res.error = std::abs(next - estimate);
    estimate = next;
    res.levels = level;
    if (level >= opt.min_levels && res.error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(estimate))) {
      res.value = estimate;
      return res;
    }
  }
  res.value = estimate;
  throw ToleranceError("exp_sinh: no convergence, last change " + std::to_string(res.error));
}

}  // namespace slepf::quad
