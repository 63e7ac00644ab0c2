#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "slepf/exact_pf.hpp"
#include "slepf/linkpat.hpp"
#include "slepf/loewner.hpp"

namespace slepf {

enum class LinkChoice { first, fixed, random };

struct CascadeConfig {
  double kappa = 3.0;
  LinkPattern alpha;
  std::vector<double> pts;
  LinkChoice link_choice = LinkChoice::first;
  Link fixed_link{1, 2};
  long samples = 10000;
  double step_eps = 0.001;  // dt = step_eps * min |g - W|^2
  double stop_eps = 1e-4;   // stopping rule of each chordal run
  std::uint64_t seed = 1;
  int threads = 1;
  bool allow_above_four = false;  // kappa in (4, 6]: experimental, samples with swallowing count as crossings
};

struct McDiagnostics {
  long crossings = 0;        // samples whose value was set to 0
  long curves = 0;           // chordal runs performed
  double mean_steps = 0.0;   // Loewner steps per chordal run
  double max_sample = 0.0;   // largest per-sample value, in units of the bound (B)
  bool warned_few_samples = false;
};

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
  long samples = 0;
  McDiagnostics diagnostics;
  PartitionFnEstimate as_estimate() const { return {mean, se, Method::mc}; }
};

/// Monte-Carlo cascade estimate of Z_alpha: |x_b - x_a|^{-2h} times the sample
/// mean of prod_D Z_{beta_D}(D), each factor transported to the half-plane by
/// the chordal Loewner chain of the curve x_a -> x_b and estimated recursively.
McEstimate estimate_z(const CascadeConfig& config);

/// One cascade sample (without the |x_b - x_a|^{-2h} prefactor) for the chosen link.
double cascade_sample(double kappa, const LinkPattern& alpha, std::span<const double> pts, const Link& link,
                      const ChordalOptions& opt, std::mt19937_64& rng, McDiagnostics* diag = nullptr,
                      bool allow_swallowing = false);

struct SymmetryReport {
  McEstimate first;
  McEstimate second;
  double z = 0.0;  // difference in units of the pooled standard error
  bool passed = false;
};

/// Estimates with two different initial links (independent streams) and their
/// discrepancy; passes when |z| <= 3.
SymmetryReport symmetry_check(CascadeConfig config, const Link& link1, const Link& link2);

}  // namespace slepf
