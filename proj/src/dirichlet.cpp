#include "dnorm/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dnorm {

double bivariate_dirichlet_norm(double x, double y, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("bivariate_dirichlet_norm: alpha must be > 0");
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  const double total = ax + ay;
  if (total == 0.0) return 0.0;  // norm of the zero vector, by continuity
  return ax * reg_inc_beta(alpha, alpha + 1.0, ax / total) +
         ay * reg_inc_beta(alpha, alpha + 1.0, ay / total);
}

double generator_constant_bivariate(double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("generator_constant_bivariate: alpha must be > 0");
  }
  const double sqrt_pi = 1.7724538509055160272981674833411452;
  const double via_gamma =
      1.0 + std::exp(lgamma_fn(alpha + 0.5) - lgamma_fn(alpha + 1.0)) / sqrt_pi;
  const double via_beta = 1.0 + 1.0 / (alpha * beta_fn(alpha, 0.5));
  if (std::abs(via_gamma - via_beta) > 1e-10 * via_gamma) {
    throw numerical_error("generator_constant_bivariate: the two closed forms disagree");
  }
  return via_gamma;
}

double harmonic_generator_constant(long long d) {
  if (d < 1) throw std::invalid_argument("harmonic_generator_constant: d must be >= 1");
  // Sum ascending terms (k = d down to 1) with compensation.
  CompensatedSum s;
  for (long long k = d; k >= 1; --k) s.add(1.0 / static_cast<double>(k));
  return s.value();
}

Estimate generator_constant(double alpha, int d, const EstimationConfig& cfg) {
  if (!(alpha > 0.0)) throw std::invalid_argument("generator_constant: alpha must be > 0");
  if (d < 2) throw std::invalid_argument("generator_constant: d must be >= 2");
  if (d == 2) {
    return {generator_constant_bivariate(alpha), 0.0, 0, cfg.seed};
  }
  if (alpha == 1.0) {
    return {harmonic_generator_constant(d), 0.0, 0, cfg.seed};
  }
  const std::vector<double> ones(static_cast<std::size_t>(d), 1.0);
  return estimate_dirichlet_dnorm_gamma_form(alpha, ones, cfg);
}

namespace {

// Exact bisection on the closed-form bivariate m(alpha), which is
// continuous and strictly decreasing.
AlphaSolveResult solve_bivariate(double target, double tol) {
  double lo = std::exp2(-20.0), hi = std::exp2(20.0);
  int grow = 0;
  while (generator_constant_bivariate(lo) < target) {
    lo *= 0.25;
    if (++grow > 200) throw numerical_error("solve_alpha: target too close to d");
  }
  grow = 0;
  while (generator_constant_bivariate(hi) > target) {
    hi *= 4.0;
    if (++grow > 200) throw numerical_error("solve_alpha: target too close to 1");
  }
  double mid = std::sqrt(lo * hi), m_mid = generator_constant_bivariate(mid);
  for (int it = 0; it < 2000 && std::abs(m_mid - target) > tol; ++it) {
    if (m_mid > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    mid = std::sqrt(lo * hi);
    m_mid = generator_constant_bivariate(mid);
  }
  if (std::abs(m_mid - target) > tol) {
    throw numerical_error("solve_alpha: bisection failed to reach tolerance");
  }
  AlphaSolveResult r;
  r.alpha = mid;
  r.alpha_lo = lo;
  r.alpha_hi = hi;
  r.m_value = m_mid;
  r.m_std_error = 0.0;
  r.n_used = 0;
  r.exact = true;
  return r;
}

}  // namespace

AlphaSolveResult solve_alpha_for_constant(double target, int d, double tol,
                                          const EstimationConfig& cfg) {
  if (d < 2) throw std::invalid_argument("solve_alpha_for_constant: d must be >= 2");
  if (!(target > 1.0) || !(target < static_cast<double>(d))) {
    throw std::invalid_argument("solve_alpha_for_constant: target must lie strictly in (1, " +
                                std::to_string(d) + ")");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("solve_alpha_for_constant: tol must be > 0");
  if (d == 2) return solve_bivariate(target, tol);

  // Stochastic bisection. Each evaluation gets its own stream; a step is
  // taken only when the target lies outside the 3-SE interval, otherwise
  // the sample size doubles. Hitting the cap with the interval still
  // covering the target means m(alpha) is statistically indistinguishable
  // from the target, which is the accept state.
  cfg.validate();
  const long long n_cap = cfg.n_samples * 16;
  std::uint64_t eval_counter = 0;
  long long last_n = cfg.n_samples;
  const std::vector<double> ones(static_cast<std::size_t>(d), 1.0);

  // decide: +1 move right (m(alpha) above target), -1 move left,
  // 0 undecided at the cap.
  auto evaluate = [&](double alpha, Estimate& out) {
    for (long long n = cfg.n_samples;; n *= 2) {
      EstimationConfig ecfg = cfg;
      ecfg.n_samples = std::min(n, n_cap);
      ecfg.seed = mix64(cfg.seed + (++eval_counter));
      out = estimate_dirichlet_dnorm_gamma_form(alpha, ones, ecfg);
      last_n = ecfg.n_samples;
      if (out.value - 3.0 * out.std_error > target) return +1;
      if (out.value + 3.0 * out.std_error < target) return -1;
      if (ecfg.n_samples >= n_cap) return 0;
    }
  };

  // Grow the bracket geometrically outward from a moderate start; the
  // estimator variance blows up like 1/alpha toward 0, so the endpoints
  // are approached only as far as the target demands.
  double lo = 0.125, hi = 8.0;
  Estimate at_end;
  int grow = 0;
  int side = 0;
  while ((side = evaluate(lo, at_end)) != +1) {
    if (side == 0) {
      throw numerical_error(
          "solve_alpha_for_constant: cannot separate m(alpha_lo) from the target at the "
          "configured n_samples; increase n_samples");
    }
    lo *= 0.25;
    if (++grow > 40) throw numerical_error("solve_alpha_for_constant: target too close to d");
  }
  grow = 0;
  while ((side = evaluate(hi, at_end)) != -1) {
    if (side == 0) {
      throw numerical_error(
          "solve_alpha_for_constant: cannot separate m(alpha_hi) from the target at the "
          "configured n_samples; increase n_samples");
    }
    hi *= 4.0;
    if (++grow > 40) throw numerical_error("solve_alpha_for_constant: target too close to 1");
  }

  AlphaSolveResult r;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    Estimate at_mid;
    const int decision = evaluate(mid, at_mid);
    if (decision == 0) {
      r.alpha = mid;
      r.alpha_lo = lo;
      r.alpha_hi = hi;
      r.m_value = at_mid.value;
      r.m_std_error = at_mid.std_error;
      r.n_used = last_n;
      r.exact = false;
      return r;
    }
    if (decision > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw numerical_error("solve_alpha_for_constant: bisection failed to localize alpha");
}

ChainCheckReport dirichlet_norm_bounds_check(double alpha1, double alpha2,
                                             std::span<const double> x,
                                             const EstimationConfig& cfg) {
  validate_point(x);
  if (!(alpha1 > 0.0) || !(alpha2 > alpha1)) {
    throw std::invalid_argument("dirichlet_norm_bounds_check: need 0 < alpha1 < alpha2");
  }
  cfg.validate();
  const int d = static_cast<int>(x.size());
  const double delta = alpha2 - alpha1;

  RunningStats lower, middle, upper;
  long long violations = 0;
  Rng rng = Rng::stream(cfg.seed, 0);
  std::vector<double> v(static_cast<std::size_t>(d)), w(static_cast<std::size_t>(d));
  for (long long k = 0; k < cfg.n_samples; ++k) {
    double max_v = 0.0, max_vw = 0.0, max_w = 0.0;
    for (int i = 0; i < d; ++i) {
      v[i] = rng.gamma(alpha1);
      w[i] = rng.gamma(delta);
      const double ax = std::abs(x[static_cast<std::size_t>(i)]);
      max_v = std::max(max_v, ax * v[i]);
      max_vw = std::max(max_vw, ax * (v[i] + w[i]));
      max_w = std::max(max_w, ax * w[i]);
    }
    lower.add(max_v);
    middle.add(max_vw);
    upper.add(max_v + max_w);
    // The chain holds pointwise in exact arithmetic; allow a few ulps
    // for the two association orders of the products.
    const double slack = 4.0 * std::numeric_limits<double>::epsilon();
    if (max_v > max_vw * (1.0 + slack) || max_vw > (max_v + max_w) * (1.0 + slack)) {
      ++violations;
    }
  }

  const auto pack = [&](const RunningStats& s) {
    return Estimate{s.mean(), s.std_error(), s.count(), cfg.seed};
  };
  ChainCheckReport report;
  report.lower = pack(lower);
  report.middle = pack(middle);
  report.upper = pack(upper);
  report.violations = violations;
  const double se_lm =
      std::sqrt(report.lower.std_error * report.lower.std_error +
                report.middle.std_error * report.middle.std_error);
  const double se_mu =
      std::sqrt(report.middle.std_error * report.middle.std_error +
                report.upper.std_error * report.upper.std_error);
  report.pass = violations == 0 && report.lower.value <= report.middle.value + 3.0 * se_lm &&
                report.middle.value <= report.upper.value + 3.0 * se_mu;
  return report;
}

std::vector<double> uniform_spacings_sample(int d, Rng& rng) {
  return GeneratorSpec::uniform_spacings(d).sample(rng);
}

}  // namespace dnorm
