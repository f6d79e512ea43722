#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "dnorm/core.hpp"
#include "dnorm/montecarlo.hpp"
#include "oracles.hpp"

using dnorm::EstimationConfig;
using dnorm::GeneratorSpec;

TEST_CASE("degenerate generators give exact estimates with zero error") {
  const EstimationConfig cfg{1000, 5, 1};
  const std::vector<double> x{-1.5, 0.25, 3.0};
  const auto constant = dnorm::estimate_dnorm(GeneratorSpec::constant(3), x, cfg);
  CHECK(constant.value == 3.0);
  CHECK(constant.std_error == 0.0);
  CHECK(constant.n_samples == 1000);

  const std::vector<double> ones{1.0, 1.0, 1.0};
  const auto sp = dnorm::estimate_dnorm(GeneratorSpec::scaled_permutation(3), ones, cfg);
  CHECK(sp.value == 3.0);
  CHECK(sp.std_error == 0.0);
}

TEST_CASE("frechet generator reproduces the logistic norm") {
  const EstimationConfig cfg{100000, 6, 1};
  const std::vector<double> ones{1.0, 1.0, 1.0};
  const auto e = dnorm::estimate_dnorm(GeneratorSpec::frechet_logistic(3, 2.0), ones, cfg);
  CHECK(std::abs(e.value - std::sqrt(3.0)) < 3.0 * e.std_error);
}

TEST_CASE("extremal coefficient: exact endpoints and the harmonic value") {
  const EstimationConfig cfg{100000, 7, 1};
  CHECK(dnorm::estimate_extremal_coefficient(GeneratorSpec::constant(5), cfg).value == 1.0);
  CHECK(dnorm::estimate_extremal_coefficient(GeneratorSpec::scaled_permutation(4), cfg).value ==
        4.0);
  const auto e = dnorm::estimate_extremal_coefficient(GeneratorSpec::dirichlet(5, 1.0), cfg);
  CHECK(std::abs(e.value - 137.0 / 60.0) < 3.0 * e.std_error);
}

TEST_CASE("identical seeds reproduce the estimate bit for bit") {
  const std::vector<double> x{0.3, -2.0};
  const auto spec = GeneratorSpec::frechet_logistic(2, 1.6);
  for (int streams : {1, 3}) {
    const EstimationConfig cfg{20000, 99, streams};
    const auto a = dnorm::estimate_dnorm(spec, x, cfg);
    const auto b = dnorm::estimate_dnorm(spec, x, cfg);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(a.n_samples == b.n_samples);
  }
}

TEST_CASE("homogeneity: exact for power-of-two scales, 1e-12 otherwise") {
  const std::vector<double> x{0.7, -1.3, 0.2};
  const auto spec = GeneratorSpec::dirichlet(3, 2.0);
  const EstimationConfig cfg{5000, 11, 1};
  const auto base = dnorm::estimate_dnorm(spec, x, cfg);
  for (double c : {2.0, 8.0, 0.25, -4.0}) {
    std::vector<double> cx(x);
    for (auto& v : cx) v *= c;
    const auto scaled = dnorm::estimate_dnorm(spec, cx, cfg);
    CHECK(scaled.value == std::abs(c) * base.value);  // bit-exact scaling
  }
  for (double c : {1.7, -0.3, 3.14159}) {
    std::vector<double> cx(x);
    for (auto& v : cx) v *= c;
    const auto scaled = dnorm::estimate_dnorm(spec, cx, cfg);
    CHECK(scaled.value == doctest::Approx(std::abs(c) * base.value).epsilon(1e-12));
  }
}

TEST_CASE("triangle inequality and eqn-(1) bounds with shared seeds") {
  std::mt19937_64 gen(12);
  for (const auto& spec : {GeneratorSpec::dirichlet(3, 0.8),
                           GeneratorSpec::frechet_logistic(3, 2.5),
                           GeneratorSpec::scaled_permutation(3)}) {
    const auto x = oracles::random_point(gen, 3, 2.0);
    const auto y = oracles::random_point(gen, 3, 2.0);
    std::vector<double> xy(3);
    for (int i = 0; i < 3; ++i) xy[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + y[static_cast<std::size_t>(i)];
    const EstimationConfig cfg{20000, 13, 1};
    const auto ex = dnorm::estimate_dnorm(spec, x, cfg);
    const auto ey = dnorm::estimate_dnorm(spec, y, cfg);
    const auto exy = dnorm::estimate_dnorm(spec, xy, cfg);
    CHECK(exy.value <= ex.value + ey.value + 1e-12);
    CHECK(dnorm::sup_norm(x) - 3.0 * ex.std_error <= ex.value);
    CHECK(ex.value <= dnorm::l1_norm(x) + 3.0 * ex.std_error);
    // Per-draw: the max never exceeds the sum.
    dnorm::Rng rng(14);
    std::vector<double> z;
    for (int k = 0; k < 2000; ++k) {
      spec.sample_into(rng, z);
      double mx = 0.0, sum = 0.0;
      for (int i = 0; i < 3; ++i) {
        mx = std::max(mx, std::abs(x[static_cast<std::size_t>(i)]) * z[static_cast<std::size_t>(i)]);
        sum += std::abs(x[static_cast<std::size_t>(i)]) * z[static_cast<std::size_t>(i)];
      }
      CHECK(mx <= sum * (1.0 + 1e-15));
    }
  }
}

TEST_CASE("paired estimation with identical specs gives an exactly zero difference") {
  const auto spec = GeneratorSpec::dirichlet(2, 1.0);
  const std::vector<double> x{1.0, 1.0};
  const auto p = dnorm::estimate_dnorm_paired(spec, spec, x, {20000, 15, 1});
  CHECK(p.diff.value == 0.0);
  CHECK(p.diff.std_error == 0.0);
  CHECK(p.a.value == p.b.value);

  // Multi-stream pairing stays deterministic.
  const auto q1 = dnorm::estimate_dnorm_paired(spec, GeneratorSpec::dirichlet(2, 3.0), x,
                                               {20000, 15, 2});
  const auto q2 = dnorm::estimate_dnorm_paired(spec, GeneratorSpec::dirichlet(2, 3.0), x,
                                               {20000, 15, 2});
  CHECK(q1.diff.value == q2.diff.value);
  CHECK(q1.a.value == q2.a.value);
}

TEST_CASE("paired dirichlet estimates match closed forms and stay ordered") {
  const std::vector<double> x{1.0, 1.0};
  const auto p = dnorm::estimate_dnorm_paired(GeneratorSpec::dirichlet(2, 1.0),
                                              GeneratorSpec::dirichlet(2, 2.0), x,
                                              {200000, 16, 1});
  // m(1) = 1.5 and m(2) = 1.375 in dimension two.
  CHECK(std::abs(p.a.value - 1.5) < 3.0 * p.a.std_error);
  CHECK(std::abs(p.b.value - 1.375) < 3.0 * p.b.std_error);
  CHECK(p.diff.value >= -3.0 * p.diff.std_error);
  // Coupling reduces the variance of the difference.
  CHECK(p.diff.std_error <
        std::sqrt(p.a.std_error * p.a.std_error + p.b.std_error * p.b.std_error));

  std::mt19937_64 gen(17);
  const auto x3 = oracles::random_point(gen, 3, 2.0);
  const auto q = dnorm::estimate_dnorm_paired(GeneratorSpec::dirichlet(3, 0.5),
                                              GeneratorSpec::dirichlet(3, 1.0), x3,
                                              {100000, 18, 1});
  CHECK(q.diff.value >= -3.0 * q.diff.std_error);
}

TEST_CASE("paired frechet estimates are monotone in lambda") {
  const std::vector<double> ones{1.0, 1.0, 1.0};
  const auto p = dnorm::estimate_dnorm_paired(GeneratorSpec::frechet_logistic(3, 1.5),
                                              GeneratorSpec::frechet_logistic(3, 3.0), ones,
                                              {100000, 19, 1});
  CHECK(std::abs(p.a.value - std::pow(3.0, 1.0 / 1.5)) < 3.0 * p.a.std_error);
  CHECK(std::abs(p.b.value - std::pow(3.0, 1.0 / 3.0)) < 3.0 * p.b.std_error);
  CHECK(p.diff.value >= -3.0 * p.diff.std_error);
}

TEST_CASE("unsupported pairings raise invalid_argument") {
  const std::vector<double> x{1.0, 1.0};
  CHECK_THROWS_AS(dnorm::estimate_dnorm_paired(GeneratorSpec::dirichlet(2, 1.0),
                                               GeneratorSpec::frechet_logistic(2, 2.0), x,
                                               {1000, 20, 1}),
                  std::invalid_argument);
}

TEST_CASE("gamma-form dirichlet estimator hits its oracles") {
  // E max(2 V1, V2) = 2 + 1 - E min(2 V1, V2) = 3 - 2/3 for standard
  // exponentials (min of exponentials with rates 1/2 and 1).
  const auto e1 =
      dnorm::estimate_dirichlet_dnorm_gamma_form(1.0, std::vector<double>{2.0, 1.0},
                                                 {100000, 21, 1});
  CHECK(std::abs(e1.value - 7.0 / 3.0) < 3.0 * e1.std_error);

  const auto e2 = dnorm::estimate_dirichlet_dnorm_gamma_form(
      1.0, std::vector<double>(4, 1.0), {100000, 22, 1});
  CHECK(std::abs(e2.value - 25.0 / 12.0) < 3.0 * e2.std_error);

  const auto e3 = dnorm::estimate_dirichlet_dnorm_gamma_form(
      2.5, std::vector<double>{1.0, 0.0, 0.0}, {100000, 23, 1});
  CHECK(std::abs(e3.value - 1.0) < 3.0 * e3.std_error);
  CHECK_THROWS_AS(dnorm::estimate_dirichlet_dnorm_gamma_form(0.0, std::vector<double>{1.0},
                                                             {1000, 24, 1}),
                  std::invalid_argument);
}

TEST_CASE("quotient and gamma-form dirichlet estimators agree within 5 SE") {
  std::mt19937_64 gen(25);
  const auto x = oracles::random_point(gen, 3, 2.0);
  const auto quotient =
      dnorm::estimate_dnorm(GeneratorSpec::dirichlet(3, 2.5), x, {200000, 26, 1});
  const auto gamma_form =
      dnorm::estimate_dirichlet_dnorm_gamma_form(2.5, x, {200000, 27, 1});
  const double se = std::sqrt(quotient.std_error * quotient.std_error +
                              gamma_form.std_error * gamma_form.std_error);
  CHECK(std::abs(quotient.value - gamma_form.value) < 5.0 * se);
}

TEST_CASE("estimation config validation") {
  const std::vector<double> x{1.0};
  CHECK_THROWS_AS(dnorm::estimate_dnorm(GeneratorSpec::constant(1), x, {1, 0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(dnorm::estimate_dnorm(GeneratorSpec::constant(1), x, {100, 0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      dnorm::estimate_dnorm(GeneratorSpec::constant(2), std::vector<double>{1.0}, {100, 0, 1}),
      std::invalid_argument);
}
