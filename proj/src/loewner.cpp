#include "slepf/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "slepf/errors.hpp"
#include "slepf/rng.hpp"

namespace slepf {

DrivingFunction sample_driving(double kappa, double T, double dt, std::uint64_t seed, double w0) {
  if (!(dt > 0.0) || !(T >= 0.0)) throw DomainError("sample_driving: need dt > 0 and T >= 0");
  if (kappa < 0.0) throw DomainError("sample_driving: kappa must be nonnegative");
  DrivingFunction d;
  d.dt = dt;
  d.kappa = kappa;
  const auto n = static_cast<std::size_t>(std::llround(T / dt));
  d.w.resize(n + 1);
  d.w[0] = w0;
  auto rng = stream_rng(seed, 0);
  std::normal_distribution<double> normal(0.0, std::sqrt(kappa * dt));
  for (std::size_t i = 1; i <= n; ++i) d.w[i] = d.w[i - 1] + (kappa > 0.0 ? normal(rng) : 0.0);
  return d;
}

LoewnerChain::LoewnerChain(std::span<const double> xs, double w0) : w_(w0) {
  pts_.reserve(xs.size());
  for (double x : xs) {
    if (x == w0) throw DomainError("LoewnerChain: tracked point coincides with the driving value");
    TrackedPoint p;
    p.x = x;
    p.d = x - w0;
    pts_.push_back(p);
  }
  order_.resize(pts_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [&](auto a, auto b) { return pts_[a].x < pts_[b].x; });
  rank_.resize(pts_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) rank_[order_[k]] = k;
  for (std::size_t k = 0; k + 1 < order_.size(); ++k) {
    gap_.push_back(pts_[order_[k + 1]].x - pts_[order_[k]].x);
    if (!(gap_.back() > 0.0)) throw DomainError("LoewnerChain: tracked points must be distinct");
  }
  r_.resize(pts_.size());
}

void LoewnerChain::step(double dt, double dw, double floor) {
  const double four_dt = 4.0 * dt;
  for (std::size_t i = 0; i < pts_.size(); ++i) r_[i] = std::sqrt(pts_[i].d * pts_[i].d + four_dt);
  for (std::size_t k = 0; k < gap_.size(); ++k) {
    const auto& p = pts_[order_[k]];
    const auto& q = pts_[order_[k + 1]];
    const double rp = r_[order_[k]], rq = r_[order_[k + 1]];
    if ((p.d > 0.0) == (q.d > 0.0)) {
      gap_[k] *= (std::abs(p.d) + std::abs(q.d)) / (rp + rq);
    } else {
      gap_[k] = rp + rq;
    }
  }
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    auto& p = pts_[i];
    if (p.swallowed) continue;
    const double r = r_[i];
    p.gp *= std::abs(p.d) / r;
    const double moved = std::copysign(r, p.d) - dw;
    if ((moved > 0.0) != (p.d > 0.0) || std::abs(moved) <= floor) {
      p.swallowed = true;
      p.tau = t_ + dt;
    }
    p.d = moved;
  }
  t_ += dt;
  w_ += dw;
}

double LoewnerChain::separation(std::size_t i, std::size_t j) const {
  std::size_t lo = rank_[i], hi = rank_[j];
  const double sign = lo <= hi ? 1.0 : -1.0;
  if (lo > hi) std::swap(lo, hi);
  double s = 0.0;
  for (std::size_t k = lo; k < hi; ++k) s += gap_[k];
  return sign * s;
}

double LoewnerChain::min_offset() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : pts_) {
    if (!p.swallowed) m = std::min(m, std::abs(p.d));
  }
  return m;
}

bool LoewnerChain::any_swallowed() const {
  return std::any_of(pts_.begin(), pts_.end(), [](const TrackedPoint& p) { return p.swallowed; });
}

LoewnerChain evolve(LoewnerChain chain, const DrivingFunction& driving, double T) {
  if (driving.w.empty()) return chain;
  const auto n = std::min(driving.w.size() - 1, static_cast<std::size_t>(std::llround(T / driving.dt)));
  const double floor = 2.0 * std::sqrt(2.0 * driving.dt) * std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < n; ++i) {
    chain.step(driving.dt, driving.w[i + 1] - driving.w[i], floor);
  }
  return chain;
}

std::vector<std::complex<double>> trace_tips(const DrivingFunction& driving, std::size_t stride) {
  if (stride == 0) throw DomainError("trace_tips: stride must be positive");
  std::vector<std::complex<double>> tips;
  if (driving.w.size() < 2) return tips;
  const std::size_t n = driving.w.size() - 1;
  const double four_dt = 4.0 * driving.dt;
  for (std::size_t m = stride; m <= n; m += stride) {
    // Step k slits at w[k]; the tip after m steps is the preimage of w[m - 1].
    std::complex<double> z = driving.w[m - 1];
    for (std::size_t k = m; k-- > 0;) {
      const double w = driving.w[k];
      std::complex<double> r = std::sqrt((z - w) * (z - w) - four_dt);
      if (r.imag() < 0.0 || (r.imag() == 0.0 && (r.real() > 0.0) != (z.real() - w > 0.0))) r = -r;
      z = w + r;
    }
    tips.push_back(z);
  }
  return tips;
}

double poisson_ratio(const LoewnerChain& chain, std::size_t i, std::size_t j) {
  const auto& p = chain[i];
  const auto& q = chain[j];
  if (p.swallowed || q.swallowed) throw DomainError("poisson_ratio: point swallowed");
  const double num = q.x - p.x;
  const double den = chain.separation(i, j);
  if (den == 0.0) return 0.0;
  // Grouped so that deeply pinched configurations do not underflow to 0 / 0.
  return (p.gp / den) * (q.gp / den) * num * num;
}

double neighbour_ratio_product(const ChordalRun& run) {
  const auto& c = run.chain;
  std::vector<std::size_t> neg, pos;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i].swallowed) continue;
    (c[i].x > 0.0 ? pos : neg).push_back(i);
  }
  double prod = 1.0;
  for (auto* side : {&neg, &pos}) {
    std::sort(side->begin(), side->end(), [&](auto a, auto b) { return c[a].x < c[b].x; });
    for (std::size_t k = 1; k < side->size(); ++k) prod *= poisson_ratio(c, (*side)[k - 1], (*side)[k]);
  }
  return prod;
}

namespace {

// A point can only change side if |dw| exceeds its offset; such steps are
// split at a Brownian-bridge midpoint until they are safe.
void bridged_step(LoewnerChain& chain, double dt, double dw, double floor, double kappa, int depth,
                  std::mt19937_64& rng, std::normal_distribution<double>& normal) {
  if (depth <= 0 || std::abs(dw) < 0.5 * chain.min_offset()) {
    // Slit at the midpoint value of the driving increment.
    chain.step(0.0, 0.5 * dw, floor);
    chain.step(dt, 0.5 * dw, floor);
    return;
  }
  const double mid = 0.5 * dw + 0.5 * std::sqrt(kappa * dt) * normal(rng);
  bridged_step(chain, 0.5 * dt, mid, floor, kappa, depth - 1, rng, normal);
  bridged_step(chain, 0.5 * dt, dw - mid, floor, kappa, depth - 1, rng, normal);
}

}  // namespace

void brownian_step(LoewnerChain& chain, double dt, double kappa, std::mt19937_64& rng, int max_refine, double floor) {
  std::normal_distribution<double> normal(0.0, 1.0);
  bridged_step(chain, dt, std::sqrt(kappa * dt) * normal(rng), floor, kappa, max_refine, rng, normal);
}

ChordalRun chordal_between(double kappa, double x_a, double x_b, std::span<const double> xs,
                           const ChordalOptions& opt, std::mt19937_64& rng, const ChordalObservable& observable) {
  if (!(kappa > 0.0 && kappa < 8.0)) throw DomainError("chordal_between: kappa must lie in (0, 8)");
  if (x_a == x_b) throw DomainError("chordal_between: endpoints coincide");
  ChordConjugation phi{x_a, x_b};
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (double x : xs) {
    if (x == x_a || x == x_b) throw DomainError("chordal_between: tracked point equals an endpoint");
    ys.push_back(phi(x));
  }
  ChordalRun run{phi, LoewnerChain(ys), 0.0, 0, false};
  run.observable = observable(run);
  if (ys.empty()) {
    run.converged = true;
    return run;
  }
  double scale2 = 0.0;
  for (double y : ys) scale2 = std::max(scale2, y * y);
  const double t_max = opt.max_capacity * scale2;
  double checkpoint = 0.25 * run.chain.min_offset() * run.chain.min_offset();
  double last = run.observable;
  int checks = 0;
  while (true) {
    const double m = run.chain.min_offset();
    if (!std::isfinite(m)) {
      run.observable = observable(run);
      run.converged = true;
      return run;
    }
    double dt = opt.step_eps * m * m;
    bool at_check = false;
    if (run.chain.time() + dt >= checkpoint) {
      dt = checkpoint - run.chain.time();
      at_check = true;
    }
    const double floor = opt.swallow_floor * std::sqrt(run.chain.time() + scale2);
    brownian_step(run.chain, dt, kappa, rng, opt.max_refine, floor);
    ++run.steps;
    if (!at_check) continue;
    const double now = observable(run);
    ++checks;
    const double change = std::abs(now - last);
    last = now;
    if (checks >= 3 && change <= opt.stop_eps * std::abs(now)) {
      run.observable = now;
      run.converged = true;
      return run;
    }
    if (checkpoint > t_max) {
      run.observable = now;
      throw TruncationError("chordal_between: stopping rule not met", -1, run.chain.time());
    }
    checkpoint *= 2.0;
  }
}

}  // namespace slepf
