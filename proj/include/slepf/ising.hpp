#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "slepf/linkpat.hpp"

namespace slepf {

/// Kramers-Wannier self-dual point 0.5 ln(1 + sqrt 2).
double beta_critical();

enum class Dynamics { heat_bath, swendsen_wang, hybrid };

/// Square lattice with width x height interior sites surrounded by a frozen
/// ring of boundary spins (corner sites included). The ring is indexed
/// counterclockwise starting from the top-left corner site; ring edge k joins
/// ring sites k and k + 1. Marked points are ring edges; the arc after mark j
/// (counterclockwise) carries spin + for odd j and - for even j.
struct IsingConfig {
  int width = 64;
  int height = 64;
  double beta = 0.0;
  std::vector<int> marks;  // increasing ring-edge indices, even count
  int sweeps_between = 5;
  int burn_in = 1000;
  long samples = 1000;
  std::uint64_t seed = 1;
  Dynamics dynamics = Dynamics::hybrid;
  int chains = 1;
};

int ring_length(int width, int height);
/// Ring edges just counterclockwise of the four corners (TL, BL, BR, TR).
std::vector<int> corner_marks(int width, int height);
/// Marks at counterclockwise boundary fractions measured from the top-left corner.
std::vector<int> fraction_marks(int width, int height, const std::vector<double>& fractions);
/// "corners" or a comma-separated list of fractions in [0, 1).
std::vector<int> parse_arcs(const std::string& spec, int width, int height);

class SpinField {
 public:
  SpinField(int width, int height);
  int width() const { return w_; }
  int height() const { return h_; }
  /// Site (i, j), 0 <= i <= width + 1, 0 <= j <= height + 1.
  std::int8_t& at(int i, int j) { return s_[static_cast<std::size_t>(j * (w_ + 2) + i)]; }
  std::int8_t at(int i, int j) const { return s_[static_cast<std::size_t>(j * (w_ + 2) + i)]; }
  /// Coordinates of ring site k.
  std::pair<int, int> ring_site(int k) const;
  double magnetization() const;     // mean interior spin
  double energy_per_edge() const;   // -mean s_x s_y over edges touching the interior

 private:
  int w_, h_;
  std::vector<std::int8_t> s_;
};

/// Boundary ring set from the marks; interior all + (or uniform random when rng given).
SpinField initial_field(const IsingConfig& cfg, std::mt19937_64* rng = nullptr);

void heat_bath_sweep(SpinField& f, double beta, std::mt19937_64& rng);
/// Swendsen-Wang update; clusters touching the frozen ring never flip.
void swendsen_wang_sweep(SpinField& f, double beta, std::mt19937_64& rng);
void sweep(SpinField& f, double beta, Dynamics dyn, std::mt19937_64& rng);

/// Field after burn-in plus `extra` sweeps from a random interior.
SpinField sample_spins(const IsingConfig& cfg, int extra = 0);

/// Pairing of the marked points by the domain walls (minus on the left,
/// left turn at checkerboard plaquettes). Throws ConsistencyError if a wall
/// revisits a directed dual edge or leaves through an unmarked edge.
LinkPattern trace_interfaces(const SpinField& f, const std::vector<int>& marks);

struct CrossingResult {
  std::vector<LinkPattern> patterns;   // LP_N in canonical order
  std::vector<double> empirical;
  std::vector<double> stderr_binomial;
  std::vector<double> predicted;       // empty when no prediction is available
  long samples = 0;
};

/// Empirical connectivity distribution and the kappa = 3 prediction at the
/// half-plane images of the marks (exact for N <= 2; for N = 3 Monte-Carlo
/// numerators over the Pfaffian total, using `prediction_samples`).
CrossingResult crossing_experiment(const IsingConfig& cfg, long prediction_samples = 20000);

/// Half-plane images of the marks for the width x height rectangle.
std::vector<double> mark_images(int width, int height, const std::vector<int>& marks);

}  // namespace slepf
