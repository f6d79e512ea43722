#include "dnorm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "dnorm/format.hpp"

namespace dnorm {

std::vector<double> sample_max_stable_spectral(const GeneratorSpec& spec, int n_points,
                                               Rng& rng) {
  if (n_points < 1) throw std::invalid_argument("sample_max_stable: n_points must be >= 1");
  const int d = spec.dim();
  std::vector<double> running_max(static_cast<std::size_t>(d), 0.0);
  std::vector<double> z;
  double gamma_sum = 0.0;
  for (int k = 0; k < n_points; ++k) {
    gamma_sum += rng.exponential();
    const double v = 1.0 / gamma_sum;
    spec.sample_into(rng, z);
    for (int i = 0; i < d; ++i) {
      running_max[static_cast<std::size_t>(i)] =
          std::max(running_max[static_cast<std::size_t>(i)], v * z[static_cast<std::size_t>(i)]);
    }
  }
  return running_max;
}

std::vector<double> sample_max_stable(const MaxStableConfig& cfg, Rng& rng) {
  int points = cfg.n_points;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    std::vector<double> m = sample_max_stable_spectral(cfg.spec, points, rng);
    const bool positive = std::all_of(m.begin(), m.end(), [](double v) { return v > 0.0; });
    if (positive) {
      for (double& v : m) v = -1.0 / v;
      return m;
    }
    points *= 2;
  }
  throw numerical_error(
      "sample_max_stable: a spectral component stayed zero after three retries with doubled "
      "n_points; the generator gives this margin too little mass");
}

std::vector<double> sample_gpd(double alpha, int d, Rng& rng) {
  if (!(alpha > 0.0)) throw std::invalid_argument("sample_gpd: alpha must be > 0");
  if (d < 2) throw std::invalid_argument("sample_gpd: d must be >= 2");
  const GeneratorSpec spec = GeneratorSpec::dirichlet(d, alpha);
  std::vector<double> z;
  for (;;) {
    spec.sample_into(rng, z);
    // Z_i = 0 has probability zero; numerically it can round to zero.
    if (std::all_of(z.begin(), z.end(), [](double v) { return v > 0.0; })) break;
  }
  const double u = rng.uniform01();
  for (double& v : z) v = -u / v;
  return z;
}

Estimate gpd_survivor(std::span<const double> x, double alpha, const EstimationConfig& cfg) {
  validate_point(x);
  if (!(alpha > 0.0)) throw std::invalid_argument("gpd_survivor: alpha must be > 0");
  const int d = static_cast<int>(x.size());
  double sup = 0.0;
  for (double v : x) {
    if (v > 0.0) throw std::invalid_argument("gpd_survivor: x must be <= 0 componentwise");
    sup = std::max(sup, std::abs(v));
  }
  if (sup > 1.0 / static_cast<double>(d) + 1e-15) {
    throw std::invalid_argument(
        "gpd_survivor: the survivor formula holds only on ||x||_inf <= 1/d");
  }
  const double inv_alpha = 1.0 / alpha;
  return run_estimation(cfg, [x, alpha, inv_alpha](Rng& rng) {
    double m = std::numeric_limits<double>::infinity();
    for (double xi : x) m = std::min(m, std::abs(xi) * rng.gamma(alpha));
    return m * inv_alpha;
  });
}

double ks_margin_test(const std::vector<std::vector<double>>& samples, int margin) {
  if (samples.size() < 100) throw std::invalid_argument("ks_margin_test: need >= 100 samples");
  if (margin < 0 || margin >= static_cast<int>(samples.front().size())) {
    throw std::invalid_argument("ks_margin_test: margin index out of range");
  }
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& s : samples) {
    for (double v : s) {
      if (v > 0.0) throw std::invalid_argument("ks_margin_test: positive entry in sample");
    }
    values.push_back(s[static_cast<std::size_t>(margin)]);
  }
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d_stat = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = std::exp(values[i]);
    const double hi = static_cast<double>(i + 1) / n - f;
    const double lo = f - static_cast<double>(i) / n;
    d_stat = std::max({d_stat, hi, lo});
  }
  return d_stat;
}

void write_samples_csv(std::ostream& os, const std::vector<std::vector<double>>& samples,
                       const std::string& column_prefix) {
  if (samples.empty()) throw std::invalid_argument("write_samples_csv: no samples");
  const std::size_t d = samples.front().size();
  for (std::size_t i = 0; i < d; ++i) {
    os << column_prefix << '_' << (i + 1) << (i + 1 < d ? "," : "\n");
  }
  for (const auto& row : samples) {
    for (std::size_t i = 0; i < d; ++i) {
      os << format17(row[i]) << (i + 1 < d ? "," : "\n");
    }
  }
}

}  // namespace dnorm
