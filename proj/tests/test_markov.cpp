#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "dnorm/core.hpp"
#include "dnorm/markov.hpp"
#include "dnorm/transport.hpp"
#include "oracles.hpp"

using dnorm::DoublyStochasticMatrix;
using dnorm::GeneratorSpec;

namespace {

DoublyStochasticMatrix circulant3() {
  return DoublyStochasticMatrix::validate({{0.5, 0.25, 0.25},
                                           {0.25, 0.5, 0.25},
                                           {0.25, 0.25, 0.5}});
}

DoublyStochasticMatrix swap2() {
  return DoublyStochasticMatrix::validate({{0.0, 1.0}, {1.0, 0.0}});
}

}  // namespace

TEST_CASE("validation accepts identity and M0, rejects bad matrices") {
  CHECK_NOTHROW(DoublyStochasticMatrix::identity(4));
  CHECK_NOTHROW(DoublyStochasticMatrix::uniform(5));
  CHECK_THROWS_WITH_AS(
      DoublyStochasticMatrix::validate({{0.6, 0.5}, {0.5, 0.5}}),
      doctest::Contains("row 0"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      DoublyStochasticMatrix::validate({{1.1, -0.1}, {-0.1, 1.1}}),
      doctest::Contains("negative"), std::invalid_argument);
  CHECK_THROWS_AS(DoublyStochasticMatrix::validate({{1.0, 0.0}}), std::invalid_argument);
  // Row sums fine, column sums broken.
  CHECK_THROWS_WITH_AS(
      DoublyStochasticMatrix::validate({{0.7, 0.3}, {0.7, 0.3}}),
      doctest::Contains("column"), std::invalid_argument);
}

TEST_CASE("matrix powers: idempotent M0, identity, permutation order") {
  const auto m0 = DoublyStochasticMatrix::uniform(3);
  for (int n : {1, 2, 7}) {
    const auto p = dnorm::matrix_power(m0, n);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) CHECK(p(i, j) == doctest::Approx(1.0 / 3).epsilon(1e-14));
    }
  }
  const auto eye = DoublyStochasticMatrix::identity(4);
  const auto p0 = dnorm::matrix_power(eye, 0);
  const auto p9 = dnorm::matrix_power(eye, 9);
  CHECK(p0.data() == eye.data());
  CHECK(p9.data() == eye.data());

  // 3-cycle permutation has order 3.
  const auto cyc = DoublyStochasticMatrix::validate(
      {{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}});
  CHECK(dnorm::matrix_power(cyc, 3).data() == DoublyStochasticMatrix::identity(3).data());
}

TEST_CASE("powers of doubly stochastic matrices stay doubly stochastic") {
  std::mt19937_64 gen(51);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::vector<double>> rows(3, std::vector<double>(3, 0.0));
    // Convex combination of the three cyclic permutations.
    std::vector<double> w{0.2 + 0.6 * (gen() % 100) / 100.0, 0.1, 0.0};
    w[2] = 1.0 - w[0] - w[1];
    for (int i = 0; i < 3; ++i) {
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] += w[0];
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>((i + 1) % 3)] += w[1];
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>((i + 2) % 3)] += w[2];
    }
    const auto m = DoublyStochasticMatrix::validate(rows);
    CHECK_NOTHROW(dnorm::matrix_power(m, 64));  // revalidates internally
  }
}

TEST_CASE("primitivity witnesses") {
  const auto prim_m0 = dnorm::is_primitive(DoublyStochasticMatrix::uniform(4));
  CHECK(prim_m0.primitive);
  CHECK(prim_m0.witness == 1);

  CHECK_FALSE(dnorm::is_primitive(DoublyStochasticMatrix::identity(3)).primitive);
  CHECK_FALSE(dnorm::is_primitive(swap2()).primitive);

  const auto prim_circ = dnorm::is_primitive(circulant3());
  CHECK(prim_circ.primitive);
  CHECK(prim_circ.witness == 1);

  // Primitive but not positive at n = 1: cycle plus a self loop.
  const auto lazy_cycle = DoublyStochasticMatrix::validate(
      {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}});
  const auto r = dnorm::is_primitive(lazy_cycle);
  CHECK(r.primitive);
  CHECK(r.witness > 1);
}

TEST_CASE("stationary distribution is uniform exactly for primitive inputs") {
  for (const auto& m : {DoublyStochasticMatrix::uniform(5), circulant3()}) {
    const auto mu = dnorm::stationary_distribution(m);
    for (double v : mu) CHECK(v == 1.0 / m.dim());
  }
  CHECK_THROWS_AS(dnorm::stationary_distribution(DoublyStochasticMatrix::identity(3)),
                  std::invalid_argument);
}

TEST_CASE("M0 collapses every standardized generator to the sup-norm") {
  const auto m0 = DoublyStochasticMatrix::uniform(3);
  std::mt19937_64 gen(52);
  const auto x = oracles::random_point(gen, 3, 2.0);
  const double sup = dnorm::sup_norm(x);
  const dnorm::EstimationConfig cfg{2000, 53, 1};
  for (const auto& spec :
       {GeneratorSpec::constant(3), GeneratorSpec::scaled_permutation(3),
        GeneratorSpec::dirichlet(3, 2.0)}) {
    const auto seq = dnorm::iterate_generator(m0, spec, 2, x, cfg);
    REQUIRE(seq.size() == 3);
    for (std::size_t n = 1; n < seq.size(); ++n) {
      CHECK(std::abs(seq[n].value - sup) <= 4e-16 * sup);
      CHECK(seq[n].std_error <= 4e-16 * sup);
    }
  }
}

TEST_CASE("identity matrix gives a constant iteration sequence") {
  const auto eye = DoublyStochasticMatrix::identity(3);
  const dnorm::EstimationConfig cfg{5000, 54, 1};
  const std::vector<double> x{1.0, -0.5, 2.0};
  const auto seq = dnorm::iterate_generator(eye, GeneratorSpec::dirichlet(3, 1.0), 4, x, cfg);
  for (std::size_t n = 1; n < seq.size(); ++n) {
    CHECK(seq[n].value == seq[0].value);
    CHECK(seq[n].std_error == seq[0].std_error);
  }
}

TEST_CASE("primitive circulant drives the estimate to the sup-norm") {
  const auto m = circulant3();
  const std::vector<double> x{1.0, 1.0, 1.0};
  const dnorm::EstimationConfig cfg{100000, 55, 1};
  const auto seq =
      dnorm::iterate_generator(m, GeneratorSpec::scaled_permutation(3), 20, x, cfg);
  // Spread of M^n bounds the distance of M^n Z from (1,...,1).
  double previous_spread = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= 20; ++n) {
    const double spread = dnorm::row_spread(dnorm::matrix_power(m, n));
    CHECK(spread <= previous_spread + 1e-15);
    previous_spread = spread;
    const double envelope = 3.0 * dnorm::sup_norm(x) * spread;  // d * spread * ||x||_inf
    CHECK(std::abs(seq[static_cast<std::size_t>(n)].value - 1.0) <=
          3.0 * seq[static_cast<std::size_t>(n)].std_error + envelope + 1e-12);
  }
  CHECK(std::abs(seq[20].value - 1.0) <= 3.0 * seq[20].std_error + 1e-3);
  CHECK(dnorm::row_spread(dnorm::matrix_power(m, 20)) < 1e-10);
}

TEST_CASE("averaging by a doubly stochastic matrix contracts the extremal coefficient") {
  // Empirical property; checked statistically.
  const dnorm::EstimationConfig cfg{100000, 56, 1};
  for (const auto& spec :
       {GeneratorSpec::scaled_permutation(3), GeneratorSpec::dirichlet(3, 0.5)}) {
    const auto base = dnorm::estimate_extremal_coefficient(spec, cfg);
    const auto mixed =
        dnorm::estimate_extremal_coefficient(matrix_apply(circulant3(), spec), cfg);
    const double se = std::sqrt(base.std_error * base.std_error +
                                mixed.std_error * mixed.std_error);
    CHECK(mixed.value <= base.value + 5.0 * se);
  }
}

TEST_CASE("continuity bound") {
  const auto m0 = DoublyStochasticMatrix::uniform(4);
  const auto eye = DoublyStochasticMatrix::identity(4);
  CHECK(dnorm::continuity_bound(m0, m0, 0.0) == 0.0);
  CHECK(dnorm::entrywise_l1_distance(m0, eye) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(dnorm::continuity_bound(m0, eye, 0.0) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK_THROWS_AS(dnorm::continuity_bound(m0, DoublyStochasticMatrix::identity(3), 0.0),
                  std::invalid_argument);

  // Empirical: the transformed scaled-permutation generators stay within
  // the certified bound plus plug-in slack.
  const auto m1 = circulant3();
  const auto m2 = DoublyStochasticMatrix::uniform(3);
  const auto spec = GeneratorSpec::scaled_permutation(3);
  dnorm::EstimationConfig cfg;
  cfg.seed = 57;
  const auto dist = dnorm::dnorm_distance(matrix_apply(m1, spec), matrix_apply(m2, spec), 4000,
                                          cfg);
  const double bound = dnorm::continuity_bound(m1, m2, 0.0);
  CHECK(dist.cost <= bound + 0.1);
}

TEST_CASE("matrix file parsing: CSV and JSON") {
  std::istringstream csv("0.5,0.5\n0.5,0.5\n");
  const auto from_csv = dnorm::read_matrix(csv);
  CHECK(from_csv.dim() == 2);
  CHECK(from_csv(0, 1) == 0.5);

  std::istringstream json("[[0.25,0.75],[0.75,0.25]]");
  const auto from_json = dnorm::read_matrix(json);
  CHECK(from_json(1, 0) == 0.75);

  std::istringstream bad("0.5,0.5\n0.9,0.1\n");
  CHECK_THROWS_AS(dnorm::read_matrix(bad), std::invalid_argument);
  std::istringstream junk("a,b\n");
  CHECK_THROWS_AS(dnorm::read_matrix(junk), std::invalid_argument);
}
