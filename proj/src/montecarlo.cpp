#include "dnorm/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "dnorm/special.hpp"

namespace dnorm {

void EstimationConfig::validate() const {
  if (n_samples < 2) throw std::invalid_argument("estimation: n_samples must be >= 2");
  if (n_streams < 1) throw std::invalid_argument("estimation: n_streams must be >= 1");
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double n_total = na + nb;
  mean_ += delta * (nb / n_total);
  m2_ += other.m2_ + delta * delta * (na * nb / n_total);
  n_ += other.n_;
}

double RunningStats::variance() const {
  if (n_ < 2) throw std::logic_error("RunningStats: variance needs n >= 2");
  return std::max(0.0, m2_) / static_cast<double>(n_ - 1);
}

double RunningStats::std_error() const {
  return std::sqrt(variance() / static_cast<double>(n_));
}

Estimate run_estimation(const EstimationConfig& cfg,
                        const std::function<double(Rng&)>& make_draw) {
  cfg.validate();
  const int streams = cfg.n_streams;
  std::vector<RunningStats> partial(streams);

  auto worker = [&](int k) {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(k));
    const long long base = cfg.n_samples / streams;
    const long long extra = k < static_cast<int>(cfg.n_samples % streams) ? 1 : 0;
    const long long count = base + extra;
    auto draw = make_draw;  // per-worker copy: closures may hold scratch buffers
    RunningStats stats;
    for (long long i = 0; i < count; ++i) stats.add(draw(rng));
    partial[static_cast<std::size_t>(k)] = stats;
  };

  if (streams == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(streams);
    for (int k = 0; k < streams; ++k) pool.emplace_back(worker, k);
    for (auto& t : pool) t.join();
  }

  // Deterministic reduction in stream index order.
  RunningStats total;
  for (const auto& p : partial) total.merge(p);
  Estimate e;
  e.value = total.mean();
  e.std_error = total.std_error();
  e.n_samples = total.count();
  e.seed = cfg.seed;
  return e;
}

namespace {

double weighted_max(std::span<const double> x, std::span<const double> z) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i]) * z[i]);
  return m;
}

}  // namespace

Estimate estimate_dnorm(const GeneratorSpec& spec, std::span<const double> x,
                        const EstimationConfig& cfg) {
  validate_point(x);
  if (static_cast<int>(x.size()) != spec.dim()) {
    throw std::invalid_argument("estimate_dnorm: dimension mismatch");
  }
  return run_estimation(cfg, [&spec, x, z = std::vector<double>()](Rng& rng) mutable {
    spec.sample_into(rng, z);
    return weighted_max(x, z);
  });
}

Estimate estimate_extremal_coefficient(const GeneratorSpec& spec, const EstimationConfig& cfg) {
  const std::vector<double> ones(static_cast<std::size_t>(spec.dim()), 1.0);
  return estimate_dnorm(spec, ones, cfg);
}

namespace {

struct PairedAccumulator {
  RunningStats a, b, diff;
  void add(double va, double vb) {
    a.add(va);
    b.add(vb);
    diff.add(va - vb);
  }
};

PairedEstimate finish(const EstimationConfig& cfg, std::vector<PairedAccumulator>& partial) {
  PairedAccumulator total;
  for (const auto& p : partial) {
    total.a.merge(p.a);
    total.b.merge(p.b);
    total.diff.merge(p.diff);
  }
  const auto pack = [&](const RunningStats& s) {
    Estimate e;
    e.value = s.mean();
    e.std_error = s.std_error();
    e.n_samples = s.count();
    e.seed = cfg.seed;
    return e;
  };
  return {pack(total.a), pack(total.b), pack(total.diff)};
}

PairedEstimate run_paired(const EstimationConfig& cfg,
                          const std::function<void(Rng&, double&, double&)>& draw_pair) {
  cfg.validate();
  const int streams = cfg.n_streams;
  std::vector<PairedAccumulator> partial(streams);
  auto worker = [&](int k) {
    Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(k));
    const long long base = cfg.n_samples / streams;
    const long long extra = k < static_cast<int>(cfg.n_samples % streams) ? 1 : 0;
    auto draw = draw_pair;  // per-worker copy: closures may hold scratch buffers
    PairedAccumulator acc;
    for (long long i = 0; i < base + extra; ++i) {
      double va = 0.0, vb = 0.0;
      draw(rng, va, vb);
      acc.add(va, vb);
    }
    partial[static_cast<std::size_t>(k)] = acc;
  };
  if (streams == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < streams; ++k) pool.emplace_back(worker, k);
    for (auto& t : pool) t.join();
  }
  return finish(cfg, partial);
}

}  // namespace

PairedEstimate estimate_dnorm_paired(const GeneratorSpec& spec_a, const GeneratorSpec& spec_b,
                                     std::span<const double> x, const EstimationConfig& cfg) {
  validate_point(x);
  if (spec_a.dim() != spec_b.dim() || static_cast<int>(x.size()) != spec_a.dim()) {
    throw std::invalid_argument("estimate_dnorm_paired: dimension mismatch");
  }
  const int d = spec_a.dim();

  if (spec_a == spec_b) {
    // Shared draws: the difference is identically zero.
    return run_paired(cfg, [&spec_a, x, z = std::vector<double>()](Rng& rng, double& va,
                                                                   double& vb) mutable {
      spec_a.sample_into(rng, z);
      va = weighted_max(x, z);
      vb = va;
    });
  }

  using Kind = GeneratorSpec::Kind;
  if (spec_a.kind() == Kind::dirichlet && spec_b.kind() == Kind::dirichlet) {
    const double alpha_a = spec_a.dirichlet_alpha();
    const double alpha_b = spec_b.dirichlet_alpha();
    const double lo = std::min(alpha_a, alpha_b);
    const double delta = std::abs(alpha_b - alpha_a);
    // Gamma additivity coupling: V(lo + delta) = V(lo) + W(delta).
    return run_paired(cfg, [=, v = std::vector<double>(static_cast<std::size_t>(d)),
                            w = std::vector<double>(static_cast<std::size_t>(d))](
                               Rng& rng, double& va, double& vb) mutable {
      double sum_lo = 0.0, sum_hi = 0.0;
      for (int i = 0; i < d; ++i) {
        v[i] = rng.gamma(lo);
        sum_lo += v[i];
      }
      for (int i = 0; i < d; ++i) {
        w[i] = v[i] + rng.gamma(delta);
        sum_hi += w[i];
      }
      double max_lo = 0.0, max_hi = 0.0;
      for (int i = 0; i < d; ++i) {
        max_lo = std::max(max_lo, std::abs(x[i]) * v[i]);
        max_hi = std::max(max_hi, std::abs(x[i]) * w[i]);
      }
      const double val_lo = static_cast<double>(d) * max_lo / sum_lo;
      const double val_hi = static_cast<double>(d) * max_hi / sum_hi;
      va = alpha_a <= alpha_b ? val_lo : val_hi;
      vb = alpha_a <= alpha_b ? val_hi : val_lo;
    });
  }

  if (spec_a.kind() == Kind::frechet_logistic && spec_b.kind() == Kind::frechet_logistic) {
    const double la = spec_a.frechet_lambda();
    const double lb = spec_b.frechet_lambda();
    const double ga = 1.0 / gamma_fn(1.0 - 1.0 / la);
    const double gb = 1.0 / gamma_fn(1.0 - 1.0 / lb);
    return run_paired(cfg, [=](Rng& rng, double& va, double& vb) {
      double ma = 0.0, mb = 0.0;
      for (int i = 0; i < d; ++i) {
        const double e = -std::log(rng.uniform01());
        const double ax = std::abs(x[static_cast<std::size_t>(i)]);
        ma = std::max(ma, ax * std::pow(e, -1.0 / la) * ga);
        mb = std::max(mb, ax * std::pow(e, -1.0 / lb) * gb);
      }
      va = ma;
      vb = mb;
    });
  }

  throw std::invalid_argument(
      "estimate_dnorm_paired: pairing unsupported for this variant combination (supported: "
      "identical specs, dirichlet/dirichlet, frechet/frechet); fall back to independent "
      "estimates");
}

Estimate estimate_dirichlet_dnorm_gamma_form(double alpha, std::span<const double> x,
                                             const EstimationConfig& cfg) {
  validate_point(x);
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("estimate_dirichlet_dnorm_gamma_form: alpha must be > 0");
  }
  const double inv_alpha = 1.0 / alpha;
  return run_estimation(cfg, [x, alpha, inv_alpha](Rng& rng) {
    double m = 0.0;
    for (double xi : x) m = std::max(m, std::abs(xi) * rng.gamma(alpha));
    return m * inv_alpha;
  });
}

}  // namespace dnorm
