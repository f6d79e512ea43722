// D-norm generators: nonnegative random vectors Z with E(Z_i) = 1.
// GeneratorSpec is an immutable value describing how to sample Z;
// DiscreteMeasure is a finitely supported measure on the simplex
// S_d = {x >= 0 : ||x||_1 = d}.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dnorm/common.hpp"
#include "dnorm/doubly_stochastic.hpp"
#include "dnorm/rng.hpp"

namespace dnorm {

struct DiscreteMeasure {
  int d = 0;
  std::vector<std::vector<double>> atoms;  // each atom on S_d within 1e-9
  std::vector<double> weights;             // nonnegative, sum to 1 within 1e-12

  // Throws std::invalid_argument on any violated constraint.
  static DiscreteMeasure validate(int d, std::vector<std::vector<double>> atoms,
                                  std::vector<double> weights);

  std::size_t support_size() const { return atoms.size(); }

  // Barycenter sum_k w_k atom_k[i]; equals (1,...,1) when the measure is
  // the law of a standardized generator.
  std::vector<double> barycenter() const;
};

// JSON exchange format: {"d": int, "atoms": [[...]], "weights": [...]}.
std::string to_json(const DiscreteMeasure& m);
DiscreteMeasure discrete_measure_from_json(const std::string& text);

class GeneratorSpec {
 public:
  enum class Kind {
    constant,           // Z = (1,...,1); generates the sup-norm
    scaled_permutation, // random permutation of (d,0,...,0); generates L1
    frechet_logistic,   // scaled Frechet variables; generates the logistic norm
    dirichlet,          // d * Dir(alpha); the Dirichlet D-norm family
    uniform_spacings,   // spacings of d-1 uniforms, times d; equals dirichlet alpha = 1
    product,            // componentwise product of two independent generators
    matrix_transformed, // M Z for a doubly stochastic M
    discrete,           // finitely supported standardized generator
  };

  static GeneratorSpec constant(int d);
  static GeneratorSpec scaled_permutation(int d);
  // lambda > 1 strictly: Gamma(1 - 1/lambda) is undefined at lambda = 1.
  static GeneratorSpec frechet_logistic(int d, double lambda);
  static GeneratorSpec dirichlet(int d, double alpha);
  static GeneratorSpec uniform_spacings(int d);
  static GeneratorSpec product(const GeneratorSpec& a, const GeneratorSpec& b);
  static GeneratorSpec matrix_transformed(const DoublyStochasticMatrix& m,
                                          const GeneratorSpec& inner);
  // Requires the barycenter condition sum_k w_k atom_k[i] = 1 within 1e-9.
  static GeneratorSpec discrete(DiscreteMeasure measure);

  Kind kind() const;
  int dim() const;
  std::string description() const;

  double frechet_lambda() const;
  double dirichlet_alpha() const;
  GeneratorSpec factor(int i) const;  // product factors, i in {0,1}
  GeneratorSpec inner() const;        // matrix_transformed inner spec
  const DoublyStochasticMatrix& matrix() const;
  const DiscreteMeasure& measure() const;

  // One realization of Z. Draw order is fixed per variant, so equal
  // seeds give bit-identical samples.
  void sample_into(Rng& rng, std::vector<double>& out) const;
  std::vector<double> sample(Rng& rng) const;

  friend bool operator==(const GeneratorSpec& a, const GeneratorSpec& b);

 private:
  struct Node;
  explicit GeneratorSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Componentwise product of independent generators (equal dimension).
GeneratorSpec product(const GeneratorSpec& a, const GeneratorSpec& b);

// The transformed generator M Z; doubly stochastic M maps generators to
// generators and preserves ||Z||_1 = d.
GeneratorSpec matrix_apply(const DoublyStochasticMatrix& m, const GeneratorSpec& spec);

// Empirical standardized representative: n samples are mapped onto S_d
// by z -> d z / ||z||_1 with weights proportional to ||z||_1. Exactly
// equal atoms are merged. Throws numerical_error on a degenerate sample
// with ||z||_1 = 0.
DiscreteMeasure standardize(const GeneratorSpec& spec, long long n, Rng& rng);

struct ComponentCheck {
  double mean = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
  bool flagged = false;
};

struct GeneratorReport {
  std::vector<ComponentCheck> components;
  long long n_samples = 0;
  long long negative_samples = 0;
  bool pass = false;
};

// Diagnostic for the generator contract Z >= 0, E(Z_i) = 1: flags any
// component whose sample mean sits more than z_threshold standard errors
// from 1, and any negative coordinate seen.
GeneratorReport validate_generator(const GeneratorSpec& spec, long long n, Rng& rng,
                                   double z_threshold);

// Same diagnostic for an arbitrary sampler that fills a d-vector.
GeneratorReport validate_sampler(const std::function<void(Rng&, std::vector<double>&)>& sampler,
                                 int d, long long n, Rng& rng, double z_threshold);

}  // namespace dnorm
