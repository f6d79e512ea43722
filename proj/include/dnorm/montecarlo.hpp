// Monte Carlo estimation of D-norm values ||x||_D = E(max_i |x_i| Z_i)
// from generator samples, with standard errors, deterministic parallel
// streams and common-random-number pairing.
#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "dnorm/common.hpp"
#include "dnorm/generators.hpp"

namespace dnorm {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(n), unbiased variance
  long long n_samples = 0;
  std::uint64_t seed = 0;
};

struct EstimationConfig {
  long long n_samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  int n_streams = 1;

  void validate() const;
};

// Streaming (Welford) accumulator; merging is exact and associative up
// to rounding, with a fixed stream order for determinism.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  void merge(const RunningStats& other);
  long long count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased; requires n >= 2
  double std_error() const;

 private:
  long long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Runs cfg.n_samples draws of draw_fn split over cfg.n_streams streams
// (stream k uses Rng::stream(seed, k)); the reduction order is fixed, so
// the result depends only on (seed, n_streams, n_samples).
Estimate run_estimation(const EstimationConfig& cfg,
                        const std::function<double(Rng&)>& make_draw);

Estimate estimate_dnorm(const GeneratorSpec& spec, std::span<const double> x,
                        const EstimationConfig& cfg);

// ||1||_D = E(max_i Z_i), the extremal coefficient in [1, d].
Estimate estimate_extremal_coefficient(const GeneratorSpec& spec, const EstimationConfig& cfg);

struct PairedEstimate {
  Estimate a;
  Estimate b;
  Estimate diff;  // a - b with the paired-difference standard error
};

// Common-random-number comparison. Supported pairings: identical specs
// (any variant, shared draws); dirichlet vs dirichlet of equal d (gamma
// additivity coupling V(a2) = V(a1) + W); frechet_logistic vs
// frechet_logistic of equal d (shared uniforms); anything else throws
// std::invalid_argument and the caller falls back to independent runs.
PairedEstimate estimate_dnorm_paired(const GeneratorSpec& spec_a, const GeneratorSpec& spec_b,
                                     std::span<const double> x, const EstimationConfig& cfg);

// (1/alpha) E(max_i |x_i| V_i) with V_i iid Gamma(alpha): the Dirichlet
// D-norm without forming the quotient d V / ||V||_1.
Estimate estimate_dirichlet_dnorm_gamma_form(double alpha, std::span<const double> x,
                                             const EstimationConfig& cfg);

}  // namespace dnorm
