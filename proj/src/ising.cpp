#include "slepf/ising.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "slepf/errors.hpp"
#include "slepf/exact_pf.hpp"
#include "slepf/mc_pf.hpp"
#include "slepf/rng.hpp"
#include "slepf/specfun.hpp"

namespace slepf {

double beta_critical() { return 0.5 * std::log1p(std::sqrt(2.0)); }

int ring_length(int width, int height) { return 2 * width + 2 * height + 4; }

std::vector<int> corner_marks(int width, int height) {
  return {0, height + 1, width + height + 2, width + 2 * height + 3};
}

std::vector<int> fraction_marks(int width, int height, const std::vector<double>& fractions) {
  const int len = ring_length(width, height);
  std::vector<int> marks;
  for (double s : fractions) {
    if (!(s >= 0.0 && s < 1.0)) throw DomainError("arc fractions must lie in [0, 1)");
    const int k = std::min(len - 1, static_cast<int>(std::floor(s * len)));
    if (!marks.empty() && k <= marks.back()) throw DomainError("arc fractions must be increasing and resolvable");
    marks.push_back(k);
  }
  if (marks.size() % 2 != 0) throw DomainError("need an even number of marked points");
  return marks;
}

std::vector<int> parse_arcs(const std::string& spec, int width, int height) {
  if (spec == "corners") return corner_marks(width, height);
  std::vector<double> fr;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      fr.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DomainError("malformed arc specification '" + spec + "'");
    }
  }
  return fraction_marks(width, height, fr);
}

SpinField::SpinField(int width, int height) : w_(width), h_(height) {
  if (width < 1 || height < 1) throw DomainError("lattice dimensions must be positive");
  s_.assign(static_cast<std::size_t>((width + 2) * (height + 2)), 1);
}

std::pair<int, int> SpinField::ring_site(int k) const {
  const int W = w_, H = h_;
  k %= ring_length(W, H);
  if (k <= H + 1) return {0, H + 1 - k};
  k -= H + 2;
  if (k <= W) return {1 + k, 0};
  k -= W + 1;
  if (k <= H) return {W + 1, 1 + k};
  k -= H + 1;
  return {W - k, H + 1};
}

double SpinField::magnetization() const {
  double m = 0.0;
  for (int j = 1; j <= h_; ++j) {
    for (int i = 1; i <= w_; ++i) m += at(i, j);
  }
  return m / (static_cast<double>(w_) * h_);
}

double SpinField::energy_per_edge() const {
  double e = 0.0;
  long edges = 0;
  for (int j = 1; j <= h_; ++j) {
    for (int i = 0; i <= w_; ++i) {
      e -= at(i, j) * at(i + 1, j);
      ++edges;
    }
  }
  for (int j = 0; j <= h_; ++j) {
    for (int i = 1; i <= w_; ++i) {
      e -= at(i, j) * at(i, j + 1);
      ++edges;
    }
  }
  return e / static_cast<double>(edges);
}

SpinField initial_field(const IsingConfig& cfg, std::mt19937_64* rng) {
  SpinField f(cfg.width, cfg.height);
  const int len = ring_length(cfg.width, cfg.height);
  const auto& marks = cfg.marks;
  if (marks.size() % 2 != 0) throw DomainError("need an even number of marked points");
  for (std::size_t j = 0; j < marks.size(); ++j) {
    if (marks[j] < 0 || marks[j] >= len || (j > 0 && marks[j] <= marks[j - 1])) {
      throw DomainError("marks must be increasing ring-edge indices");
    }
  }
  for (int k = 0; k < len; ++k) {
    std::int8_t s = 1;
    if (!marks.empty()) {
      // Arc index: number of marks strictly before site k; 0 wraps to the last arc.
      const auto before = std::lower_bound(marks.begin(), marks.end(), k) - marks.begin();
      const long arc = before == 0 ? static_cast<long>(marks.size()) : before;
      s = (arc % 2 == 1) ? 1 : -1;
    }
    const auto [i, j] = f.ring_site(k);
    f.at(i, j) = s;
  }
  if (rng) {
    std::bernoulli_distribution coin(0.5);
    for (int j = 1; j <= cfg.height; ++j) {
      for (int i = 1; i <= cfg.width; ++i) f.at(i, j) = coin(*rng) ? 1 : -1;
    }
  }
  return f;
}

void heat_bath_sweep(SpinField& f, double beta, std::mt19937_64& rng) {
  double p_plus[9];
  for (int s = -4; s <= 4; ++s) p_plus[s + 4] = 1.0 / (1.0 + std::exp(-2.0 * beta * s));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int j = 1; j <= f.height(); ++j) {
    for (int i = 1; i <= f.width(); ++i) {
      const int field = f.at(i - 1, j) + f.at(i + 1, j) + f.at(i, j - 1) + f.at(i, j + 1);
      f.at(i, j) = u(rng) < p_plus[field + 4] ? 1 : -1;
    }
  }
}

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    x = parent[static_cast<std::size_t>(x)];
  }
  return x;
}

void unite(std::vector<int>& parent, int a, int b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
}

}  // namespace

void swendsen_wang_sweep(SpinField& f, double beta, std::mt19937_64& rng) {
  const int W = f.width(), H = f.height();
  const int stride = W + 2;
  const int n = stride * (H + 2);
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  const double p_bond = -std::expm1(-2.0 * beta);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto id = [stride](int i, int j) { return j * stride + i; };
  // Horizontal and vertical edges with at least one interior endpoint.
  for (int j = 1; j <= H; ++j) {
    for (int i = 0; i <= W; ++i) {
      if (f.at(i, j) == f.at(i + 1, j) && u(rng) < p_bond) unite(parent, id(i, j), id(i + 1, j));
    }
  }
  for (int j = 0; j <= H; ++j) {
    for (int i = 1; i <= W; ++i) {
      if (f.at(i, j) == f.at(i, j + 1) && u(rng) < p_bond) unite(parent, id(i, j), id(i, j + 1));
    }
  }
  // Clusters attached to the ring keep their spin; the others are resampled.
  std::vector<std::int8_t> fate(static_cast<std::size_t>(n), 0);  // 0 undecided, 1 keep, 2 flip
  const int len = ring_length(W, H);
  for (int k = 0; k < len; ++k) {
    const auto [i, j] = f.ring_site(k);
    fate[static_cast<std::size_t>(find_root(parent, id(i, j)))] = 1;
  }
  std::bernoulli_distribution coin(0.5);
  for (int j = 1; j <= H; ++j) {
    for (int i = 1; i <= W; ++i) {
      const auto r = static_cast<std::size_t>(find_root(parent, id(i, j)));
      if (fate[r] == 0) fate[r] = coin(rng) ? 2 : 1;
      if (fate[r] == 2) f.at(i, j) = static_cast<std::int8_t>(-f.at(i, j));
    }
  }
}

void sweep(SpinField& f, double beta, Dynamics dyn, std::mt19937_64& rng) {
  switch (dyn) {
    case Dynamics::heat_bath:
      heat_bath_sweep(f, beta, rng);
      break;
    case Dynamics::swendsen_wang:
      swendsen_wang_sweep(f, beta, rng);
      break;
    case Dynamics::hybrid:
      swendsen_wang_sweep(f, beta, rng);
      heat_bath_sweep(f, beta, rng);
      break;
  }
}

SpinField sample_spins(const IsingConfig& cfg, int extra) {
  auto rng = stream_rng(cfg.seed, 0);
  SpinField f = initial_field(cfg, &rng);
  for (int s = 0; s < cfg.burn_in + extra; ++s) sweep(f, cfg.beta, cfg.dynamics, rng);
  return f;
}

namespace {

constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

// Site at doubled coordinates (x, y) with both odd-even offsets resolved:
// plaquette (i, j) has doubled centre (2i + 1, 2j + 1) and corner sites at even coordinates.
std::int8_t site(const SpinField& f, int x2, int y2) { return f.at(x2 / 2, y2 / 2); }

}  // namespace

LinkPattern trace_interfaces(const SpinField& f, const std::vector<int>& marks) {
  const int W = f.width(), H = f.height();
  const int len = ring_length(W, H);
  if (marks.size() % 2 != 0) throw DomainError("need an even number of marked points");
  // Ring index of each boundary site, -1 inside.
  std::vector<int> ring_index(static_cast<std::size_t>((W + 2) * (H + 2)), -1);
  for (int k = 0; k < len; ++k) {
    const auto [i, j] = f.ring_site(k);
    ring_index[static_cast<std::size_t>(j * (W + 2) + i)] = k;
  }
  auto ring_of = [&](int x2, int y2) { return ring_index[static_cast<std::size_t>((y2 / 2) * (W + 2) + x2 / 2)]; };
  auto mark_of_edge = [&](int ka, int kb) {
    int edge;
    if ((ka + 1) % len == kb) {
      edge = ka;
    } else if ((kb + 1) % len == ka) {
      edge = kb;
    } else {
      throw ConsistencyError("trace_interfaces: wall left through a non-ring edge");
    }
    const auto it = std::find(marks.begin(), marks.end(), edge);
    if (it == marks.end()) throw ConsistencyError("trace_interfaces: wall left through an unmarked edge");
    return static_cast<int>(it - marks.begin()) + 1;
  };
  auto inside = [&](int i, int j) { return i >= 0 && i <= W && j >= 0 && j <= H; };
  std::vector<std::uint8_t> visited(static_cast<std::size_t>((W + 1) * (H + 1)), 0);
  std::vector<int> partner(marks.size() + 1, 0);
  for (std::size_t m = 0; m < marks.size(); ++m) {
    const auto [ai, aj] = f.ring_site(marks[m]);
    const auto [bi, bj] = f.ring_site(marks[m] + 1);
    // Plaquettes on either side of the primal edge (a, b).
    int pi, pj, qi, qj;
    if (ai == bi) {
      const int jm = std::min(aj, bj);
      pi = ai == 0 ? 0 : W;
      qi = ai == 0 ? -1 : W + 1;
      pj = qj = jm;
    } else {
      const int im = std::min(ai, bi);
      pj = aj == 0 ? 0 : H;
      qj = aj == 0 ? -1 : H + 1;
      pi = qi = im;
    }
    int d = 0;
    while (kDx[d] != pi - qi || kDy[d] != pj - qj) ++d;
    // Entry edge seen when moving in direction d into plaquette (pi, pj).
    const int cx = 2 * pi + 1, cy = 2 * pj + 1;
    const int nl = (d + 1) % 4;
    const std::int8_t left = site(f, cx - kDx[d] + kDx[nl], cy - kDy[d] + kDy[nl]);
    const std::int8_t right = site(f, cx - kDx[d] - kDx[nl], cy - kDy[d] - kDy[nl]);
    if (left == right) throw ConsistencyError("trace_interfaces: marked edge is not a sign change");
    if (left != -1) continue;  // this end is reached as an exit
    int i = pi, j = pj;
    long guard = 0;
    const long max_steps = 4L * (W + 1) * (H + 1) + 8;
    while (true) {
      auto& bits = visited[static_cast<std::size_t>(j * (W + 1) + i)];
      if (bits & (1u << d)) throw ConsistencyError("trace_interfaces: wall revisits a directed edge");
      bits = static_cast<std::uint8_t>(bits | (1u << d));
      if (++guard > max_steps) throw ConsistencyError("trace_interfaces: wall does not terminate");
      const int x = 2 * i + 1, y = 2 * j + 1;
      const int l = (d + 1) % 4;
      const std::int8_t lp = site(f, x + kDx[d] + kDx[l], y + kDy[d] + kDy[l]);
      const std::int8_t rp = site(f, x + kDx[d] - kDx[l], y + kDy[d] - kDy[l]);
      int nd;
      if (lp == 1) {
        nd = l;
      } else if (rp == 1) {
        nd = d;
      } else {
        nd = (d + 3) % 4;
      }
      const int ni = i + kDx[nd], nj = j + kDy[nd];
      if (!inside(ni, nj)) {
        // Exit edge: the two corners of plaquette (i, j) on the side facing nd.
        const int ln = (nd + 1) % 4;
        const int ex1 = x + kDx[nd] + kDx[ln], ey1 = y + kDy[nd] + kDy[ln];
        const int ex2 = x + kDx[nd] - kDx[ln], ey2 = y + kDy[nd] - kDy[ln];
        const int end = mark_of_edge(ring_of(ex1, ey1), ring_of(ex2, ey2));
        const int start = static_cast<int>(m) + 1;
        if (end == start || partner[static_cast<std::size_t>(end)] != 0) {
          throw ConsistencyError("trace_interfaces: inconsistent wall endpoints");
        }
        partner[static_cast<std::size_t>(start)] = end;
        partner[static_cast<std::size_t>(end)] = start;
        break;
      }
      i = ni;
      j = nj;
      d = nd;
    }
  }
  std::vector<Link> links;
  for (std::size_t m = 1; m < partner.size(); ++m) {
    if (partner[m] == 0) throw ConsistencyError("trace_interfaces: marked point without a wall");
    if (static_cast<int>(m) < partner[m]) links.push_back({static_cast<int>(m), partner[m]});
  }
  return LinkPattern(std::move(links));
}

std::vector<double> mark_images(int width, int height, const std::vector<int>& marks) {
  const SpinField geom(width, height);
  const double W = width, H = height;
  const auto map = rect_corner_images(H / W);
  std::vector<double> out;
  for (int k : marks) {
    const auto [ai, aj] = geom.ring_site(k);
    const auto [bi, bj] = geom.ring_site(k + 1);
    // Midpoint of the ring edge projected onto the rectangle [1/2, W + 1/2] x [1/2, H + 1/2].
    const double x = std::clamp(0.5 * (ai + bi), 0.5, W + 0.5);
    const double y = std::clamp(0.5 * (aj + bj), 0.5, H + 0.5);
    double s;
    if (x == 0.5 && y > 0.5) {
      s = (H + 0.5) - y;
    } else if (y == 0.5 && x < W + 0.5) {
      s = H + (x - 0.5);
    } else if (x == W + 0.5 && y < H + 0.5) {
      s = H + W + (y - 0.5);
    } else {
      s = 2.0 * H + W + (W + 0.5 - x);
    }
    double frac = s / (2.0 * (W + H));
    if (frac >= 1.0) frac -= 1.0;
    if (frac == 0.0) {
      out.push_back(map.corners[0]);
      continue;
    }
    out.push_back(rect_boundary_image(map, frac));
  }
  return out;
}

CrossingResult crossing_experiment(const IsingConfig& cfg, long prediction_samples) {
  if (cfg.marks.size() % 2 != 0 || cfg.marks.empty()) throw DomainError("need a positive even number of marks");
  const int n = static_cast<int>(cfg.marks.size() / 2);
  CrossingResult res;
  res.patterns = enumerate(n);
  const int chains = std::max(1, cfg.chains);
  std::vector<std::vector<long>> counts(static_cast<std::size_t>(chains), std::vector<long>(res.patterns.size(), 0));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
  auto run_chain = [&](int c) {
    try {
      auto rng = stream_rng(cfg.seed, static_cast<std::uint64_t>(c));
      SpinField f = initial_field(cfg, &rng);
      for (int s = 0; s < cfg.burn_in; ++s) sweep(f, cfg.beta, cfg.dynamics, rng);
      const long mine = cfg.samples / chains + (c < cfg.samples % chains ? 1 : 0);
      for (long k = 0; k < mine; ++k) {
        for (int s = 0; s < cfg.sweeps_between; ++s) sweep(f, cfg.beta, cfg.dynamics, rng);
        const auto alpha = trace_interfaces(f, cfg.marks);
        const auto it = std::lower_bound(res.patterns.begin(), res.patterns.end(), alpha);
        ++counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(it - res.patterns.begin())];
      }
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  };
  if (chains == 1) {
    run_chain(0);
  } else {
    std::vector<std::thread> pool;
    for (int c = 0; c < chains; ++c) pool.emplace_back(run_chain, c);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  res.samples = cfg.samples;
  const double total = static_cast<double>(cfg.samples);
  for (std::size_t a = 0; a < res.patterns.size(); ++a) {
    long c = 0;
    for (const auto& v : counts) c += v[a];
    const double p = c / total;
    res.empirical.push_back(p);
    res.stderr_binomial.push_back(std::sqrt(p * (1.0 - p) / total));
  }
  if (n > 3) return res;
  // Prediction at the half-plane images, relabelled into increasing order.
  const auto images = mark_images(cfg.width, cfg.height, cfg.marks);
  std::vector<int> order(images.size());
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return images[static_cast<std::size_t>(a - 1)] <
                                                                           images[static_cast<std::size_t>(b - 1)]; });
  std::vector<double> sorted;
  for (int o : order) sorted.push_back(images[static_cast<std::size_t>(o - 1)]);
  constexpr double kIsingKappa = 3.0;
  if (n <= 2) {
    for (const auto& alpha : res.patterns) {
      res.predicted.push_back(connectivity_ratio(kIsingKappa, subpattern(alpha, order), sorted));
    }
  } else {
    const double total_z = pfaffian_form(sorted);
    for (std::size_t a = 0; a < res.patterns.size(); ++a) {
      CascadeConfig mc;
      mc.kappa = kIsingKappa;
      mc.alpha = subpattern(res.patterns[a], order);
      mc.pts = sorted;
      mc.samples = prediction_samples;
      mc.seed = splitmix64(cfg.seed + a);
      mc.threads = chains;
      res.predicted.push_back(estimate_z(mc).mean / total_z);
    }
  }
  return res;
}

}  // namespace slepf
