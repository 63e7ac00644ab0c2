#include "slepf/mc_pf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <thread>

#include "slepf/cft_params.hpp"
#include "slepf/errors.hpp"
#include "slepf/rng.hpp"

namespace slepf {

namespace {

// Pairwise summation; the tree depends only on the length, so totals do not
// depend on how samples were distributed over threads.
double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

Link pick_link(const LinkPattern& alpha, LinkChoice choice, const Link& fixed, std::mt19937_64& rng) {
  switch (choice) {
    case LinkChoice::first:
      return alpha.links().front();
    case LinkChoice::fixed:
      return fixed;
    case LinkChoice::random: {
      std::uniform_int_distribution<int> u(0, alpha.n_links() - 1);
      return alpha.links()[static_cast<std::size_t>(u(rng))];
    }
  }
  return alpha.links().front();
}

}  // namespace

double cascade_sample(double kappa, const LinkPattern& alpha, std::span<const double> pts, const Link& link,
                      const ChordalOptions& opt, std::mt19937_64& rng, McDiagnostics* diag, bool allow_swallowing) {
  if (alpha.n_links() <= 1) return 1.0;
  const double h = derive_params(kappa).h;
  const int n = alpha.n_points();
  // Remaining indices and their positions after conjugation.
  std::vector<int> idx;
  std::vector<double> xs;
  for (int i = 1; i <= n; ++i) {
    if (i == link.a || i == link.b) continue;
    idx.push_back(i);
    xs.push_back(pts[static_cast<std::size_t>(i - 1)]);
  }
  const double x_a = pts[static_cast<std::size_t>(link.a - 1)];
  const double x_b = pts[static_cast<std::size_t>(link.b - 1)];
  // Links of the remaining pattern in chain-slot form, for the stopping observable.
  std::vector<std::pair<std::size_t, std::size_t>> slot_links;
  for (const auto& l : alpha.links()) {
    if (l == link) continue;
    const auto sa = static_cast<std::size_t>(std::find(idx.begin(), idx.end(), l.a) - idx.begin());
    const auto sb = static_cast<std::size_t>(std::find(idx.begin(), idx.end(), l.b) - idx.begin());
    slot_links.emplace_back(sa, sb);
  }
  ChordalObservable obs = [&](const ChordalRun& run) {
    double prod = 1.0;
    for (const auto& [a, b] : slot_links) {
      if (run.chain[a].swallowed || run.chain[b].swallowed) return 0.0;
      prod *= poisson_ratio(run.chain, a, b);
    }
    return prod;
  };
  {
    const ChordConjugation phi{x_a, x_b};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(phi(x));
    std::sort(ys.begin(), ys.end());
    if (std::adjacent_find(ys.begin(), ys.end()) != ys.end()) {
      // Nested images pinched together below double resolution.
      if (diag) ++diag->crossings;
      return 0.0;
    }
  }
  const auto run = chordal_between(kappa, x_a, x_b, xs, opt, rng, obs);
  if (diag) {
    ++diag->curves;
    diag->mean_steps += static_cast<double>(run.steps);
  }
  // Side of each remaining point: inside the arch maps to the positive axis.
  std::vector<Side> side_of(static_cast<std::size_t>(n), Side::left);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& p = run.chain[k];
    if (p.swallowed) {
      if (!allow_swallowing) throw TruncationError("cascade_sample: tracked point swallowed", -1, run.chain.time());
      if (diag) ++diag->crossings;
      return 0.0;
    }
    side_of[static_cast<std::size_t>(idx[k] - 1)] = p.x > 0.0 ? Side::right : Side::left;
  }
  side_of[static_cast<std::size_t>(link.a - 1)] = Side::left;
  side_of[static_cast<std::size_t>(link.b - 1)] = Side::right;
  // Split the pattern with the chosen link removed.
  std::vector<Side> rest_side;
  for (int i : idx) rest_side.push_back(side_of[static_cast<std::size_t>(i - 1)]);
  const LinkPattern hat = remove_pair(alpha, link.a, link.b);
  const auto split = side_split(hat, rest_side);
  if (!split) {
    if (diag) ++diag->crossings;
    return 0.0;
  }
  double value = 1.0;
  const ChordConjugation& phi = run.phi;
  for (int s = 0; s < 2; ++s) {
    const auto& members = s == 0 ? split->left_indices : split->right_indices;
    if (members.empty()) continue;
    // Chain slots of this component ordered by conjugated position (cyclic order of the polygon).
    std::vector<std::size_t> slots;
    for (int m : members) slots.push_back(static_cast<std::size_t>(m - 1));
    std::sort(slots.begin(), slots.end(), [&](auto a, auto b) { return run.chain[a].x < run.chain[b].x; });
    std::vector<int> order;
    std::vector<double> images;
    double cov = 1.0;
    for (auto k : slots) {
      order.push_back(static_cast<int>(k) + 1);
      images.push_back(run.chain.separation(slots.front(), k));
      cov *= std::pow(phi.derivative(xs[k]) * run.chain.gprime(k), h);
    }
    if (std::adjacent_find(images.begin(), images.end(), std::greater_equal<>()) != images.end()) {
      // Pinched off to below double resolution; the weight is negligible.
      if (diag) ++diag->crossings;
      return 0.0;
    }
    const LinkPattern beta = subpattern(hat, order);
    double z;
    if (beta.n_links() <= 2) {
      z = z_exact(kappa, beta, images);
    } else {
      const Link next = beta.links().front();
      z = std::pow(images[static_cast<std::size_t>(next.b - 1)] - images[static_cast<std::size_t>(next.a - 1)],
                   -2.0 * h) *
          cascade_sample(kappa, beta, images, next, opt, rng, diag, allow_swallowing);
    }
    value *= cov * z;
  }
  return value;
}

McEstimate estimate_z(const CascadeConfig& cfg) {
  const double kappa = cfg.kappa;
  if (!(kappa > 0.0)) throw DomainError("estimate_z: kappa must be positive");
  if (kappa > 4.0 && !(cfg.allow_above_four && kappa <= 6.0)) {
    throw UnsupportedError("estimate_z: the cascade estimator is validated for kappa in (0, 4]");
  }
  if (static_cast<int>(cfg.pts.size()) != cfg.alpha.n_points()) throw DomainError("estimate_z: point count mismatch");
  check_ordered(cfg.pts);
  if (cfg.link_choice == LinkChoice::fixed && !cfg.alpha.contains(cfg.fixed_link.a, cfg.fixed_link.b)) {
    throw DomainError("estimate_z: chosen link is not in the pattern");
  }
  if (cfg.samples < 1) throw DomainError("estimate_z: need at least one sample");
  McEstimate out;
  out.samples = cfg.samples;
  if (cfg.samples < 100) {
    out.diagnostics.warned_few_samples = true;
    std::cerr << "warning: fewer than 100 Monte-Carlo samples\n";
  }
  const double h = derive_params(kappa).h;
  if (cfg.alpha.n_links() == 0) {
    out.mean = 1.0;
    return out;
  }
  ChordalOptions opt;
  opt.step_eps = cfg.step_eps;
  opt.stop_eps = cfg.stop_eps;
  const double bound = bound_b(kappa, cfg.alpha, cfg.pts);
  const auto m = static_cast<std::size_t>(cfg.samples);
  std::vector<double> values(m);
  const int threads = std::max(1, cfg.threads);
  std::vector<McDiagnostics> diags(static_cast<std::size_t>(threads));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  auto worker = [&](int t) {
    try {
      for (std::size_t i = static_cast<std::size_t>(t); i < m; i += static_cast<std::size_t>(threads)) {
        auto rng = stream_rng(cfg.seed, i);
        const Link link = pick_link(cfg.alpha, cfg.link_choice, cfg.fixed_link, rng);
        const double pre = std::pow(cfg.pts[static_cast<std::size_t>(link.b - 1)] -
                                        cfg.pts[static_cast<std::size_t>(link.a - 1)],
                                    -2.0 * h);
        try {
          values[i] = pre * cascade_sample(kappa, cfg.alpha, cfg.pts, link, opt, rng,
                                           &diags[static_cast<std::size_t>(t)], cfg.allow_above_four);
        } catch (const TruncationError& e) {
          throw TruncationError(e.what(), static_cast<long>(i), e.capacity());
        }
      }
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& d : diags) {
    out.diagnostics.crossings += d.crossings;
    out.diagnostics.curves += d.curves;
    out.diagnostics.mean_steps += d.mean_steps;
  }
  if (out.diagnostics.curves > 0) out.diagnostics.mean_steps /= static_cast<double>(out.diagnostics.curves);
  const double n = static_cast<double>(m);
  out.mean = pairwise_sum(values.data(), m) / n;
  std::vector<double> sq(m);
  for (std::size_t i = 0; i < m; ++i) {
    sq[i] = (values[i] - out.mean) * (values[i] - out.mean);
    out.diagnostics.max_sample = std::max(out.diagnostics.max_sample, values[i] / bound);
  }
  out.se = m > 1 ? std::sqrt(pairwise_sum(sq.data(), m) / (n - 1.0) / n) : 0.0;
  return out;
}

SymmetryReport symmetry_check(CascadeConfig config, const Link& link1, const Link& link2) {
  if (!config.alpha.contains(link1.a, link1.b) || !config.alpha.contains(link2.a, link2.b)) {
    throw DomainError("symmetry_check: both links must belong to the pattern");
  }
  SymmetryReport rep;
  config.link_choice = LinkChoice::fixed;
  config.fixed_link = link1;
  rep.first = estimate_z(config);
  config.fixed_link = link2;
  config.seed = splitmix64(config.seed ^ 0xa5a5a5a5ULL);
  rep.second = estimate_z(config);
  const double pooled = std::hypot(rep.first.se, rep.second.se);
  const double diff = rep.first.mean - rep.second.mean;
  rep.z = pooled > 0.0 ? diff / pooled : 0.0;
  rep.passed = pooled > 0.0 ? std::abs(rep.z) <= 3.0 : diff == 0.0;
  return rep;
}

}  // namespace slepf
