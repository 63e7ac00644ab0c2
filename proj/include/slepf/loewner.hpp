#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace slepf {

/// Piecewise-constant driving function on a uniform grid: W(t) = w[n] for
/// t in [n dt, (n + 1) dt).
struct DrivingFunction {
  double dt = 0.0;
  double kappa = 0.0;
  std::vector<double> w;

  double duration() const { return dt * static_cast<double>(w.empty() ? 0 : w.size() - 1); }
};

/// W_0 = w0 and i.i.d. Normal(0, kappa dt) increments up to time T.
DrivingFunction sample_driving(double kappa, double T, double dt, std::uint64_t seed, double w0 = 0.0);

/// State of a boundary point under the chain: offset g_t(x) - W_t and g_t'(x).
struct TrackedPoint {
  double x = 0.0;
  double d = 0.0;
  double gp = 1.0;
  bool swallowed = false;
  double tau = 0.0;
};

/// Chordal Loewner chain towards infinity evaluated at finitely many real points.
///
/// Each step holds the driving value fixed and applies the exact vertical-slit
/// map g -> W + sign(g - W) sqrt((g - W)^2 + 4 dt), then moves the driving
/// value. Offsets g - W are the state variables, so points close to the tip
/// keep full relative precision. Gaps between neighbouring points are evolved
/// separately by the same exact map in multiplicative form, so differences
/// stay accurate after the points have been squeezed together.
class LoewnerChain {
 public:
  explicit LoewnerChain(std::span<const double> xs, double w0 = 0.0);

  /// Slit of capacity dt at the current driving value, then W += dw. A point
  /// whose offset changes sign or falls below `floor` is marked swallowed.
  void step(double dt, double dw, double floor = 0.0);

  double time() const { return t_; }
  double drive() const { return w_; }
  std::size_t size() const { return pts_.size(); }
  const TrackedPoint& operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<TrackedPoint>& points() const { return pts_; }

  double g(std::size_t i) const { return w_ + pts_[i].d; }
  double gprime(std::size_t i) const { return pts_[i].gp; }
  /// g(j) - g(i) summed over neighbouring gaps.
  double separation(std::size_t i, std::size_t j) const;
  /// Smallest |g - W| over unswallowed points (infinity if none).
  double min_offset() const;
  bool any_swallowed() const;

 private:
  std::vector<TrackedPoint> pts_;
  std::vector<std::size_t> order_;  // indices by increasing x
  std::vector<std::size_t> rank_;   // inverse of order_
  std::vector<double> gap_;         // gap_[k] = g(order_[k + 1]) - g(order_[k])
  std::vector<double> r_;           // scratch
  double t_ = 0.0;
  double w_ = 0.0;
};

/// One Brownian step of capacity dt: the slit is placed at the midpoint value of
/// the driving increment, and increments that could move a point across W are
/// split at Brownian-bridge midpoints (at most max_refine times).
void brownian_step(LoewnerChain& chain, double dt, double kappa, std::mt19937_64& rng, int max_refine = 30,
                   double floor = 0.0);

/// Tip positions of the hull generated by `driving` after every `stride`-th step,
/// by backward composition of the inverse slit maps (O(n^2) in the step count).
std::vector<std::complex<double>> trace_tips(const DrivingFunction& driving, std::size_t stride = 1);

/// Runs the chain along `driving` up to time T (clamped to the driving duration).
LoewnerChain evolve(LoewnerChain chain, const DrivingFunction& driving, double T);

/// H_{H \ K}(x, y) / H_H(x, y) = g'(x) g'(y) (y - x)^2 / (g(y) - g(x))^2 for
/// tracked points i, j of the chain.
double poisson_ratio(const LoewnerChain& chain, std::size_t i, std::size_t j);

/// Orientation-preserving Moebius map phi(x) = (x - a) / (b - x) sending
/// a -> 0 and b -> infinity. Points of (a, b) go to (0, inf); points outside
/// go to (-inf, 0), those beyond b first.
struct ChordConjugation {
  double a;
  double b;
  double operator()(double x) const { return (x - a) / (b - x); }
  double derivative(double x) const { return (b - a) / ((b - x) * (b - x)); }
};

struct ChordalOptions {
  double stop_eps = 1e-3;     // relative change of the observable over one capacity doubling
  double step_eps = 0.01;     // dt = step_eps * min |g - W|^2
  double max_capacity = 1e12; // relative to the initial spread of the points
  double swallow_floor = 0.0;  // relative to the current capacity scale
  int max_refine = 30;         // Brownian-bridge halvings of a step that could swallow a point
};

/// Result of a chordal SLE run from x_a to x_b, realized as the 0 -> infinity
/// chain in the coordinates of ChordConjugation.
struct ChordalRun {
  ChordConjugation phi;
  LoewnerChain chain;   // tracked points are phi(x) of the requested points
  double observable = 0.0;
  long steps = 0;
  bool converged = false;
};

using ChordalObservable = std::function<double(const ChordalRun&)>;

/// Default observable: product of Poisson ratios of neighbouring same-side
/// points (1 when fewer than two points are tracked per side).
double neighbour_ratio_product(const ChordalRun& run);

/// Chordal SLE_kappa from x_a to x_b tracking `xs` (none equal to x_a, x_b).
/// Runs until the observable changes by less than stop_eps (relative) over the
/// last doubling of capacity. Throws TruncationError if max_capacity is hit.
ChordalRun chordal_between(double kappa, double x_a, double x_b, std::span<const double> xs,
                           const ChordalOptions& opt, std::mt19937_64& rng,
                           const ChordalObservable& observable = neighbour_ratio_product);

}  // namespace slepf
