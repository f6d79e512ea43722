// Doubly stochastic matrices: validation, powers, primitivity,
// stationary distribution and the continuity bound for matrix-
// transformed generators.
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dnorm/common.hpp"

namespace dnorm {

// A validated d x d matrix with nonnegative entries whose rows and
// columns each sum to 1 within tolerance. Immutable once built.
class DoublyStochasticMatrix {
 public:
  // Throws std::invalid_argument naming the violated constraint.
  static DoublyStochasticMatrix validate(const std::vector<std::vector<double>>& rows,
                                         double tol = 1e-10);
  static DoublyStochasticMatrix identity(int d);
  // M0: every entry 1/d. Collapses any generator with ||Z||_1 = d to (1,...,1).
  static DoublyStochasticMatrix uniform(int d);

  int dim() const { return d_; }
  double operator()(int i, int j) const { return m_[static_cast<std::size_t>(i) * d_ + j]; }
  const std::vector<double>& data() const { return m_; }

  // out = M z (z as a column vector).
  void apply(std::span<const double> z, std::span<double> out) const;

 private:
  DoublyStochasticMatrix(int d, std::vector<double> m) : d_(d), m_(std::move(m)) {}
  int d_ = 0;
  std::vector<double> m_;  // row-major
};

// M^n by repeated squaring; n = 0 gives the identity. The result is
// revalidated with tolerance 1e-8 to absorb accumulated rounding.
DoublyStochasticMatrix matrix_power(const DoublyStochasticMatrix& m, int n);

struct PrimitivityResult {
  bool primitive = false;
  int witness = 0;  // smallest n with M^n entrywise positive, if primitive
};

// Structural primitivity check up to the Wielandt bound (d-1)^2 + 1.
// Entries below tol count as zero.
PrimitivityResult is_primitive(const DoublyStochasticMatrix& m, double tol = 1e-12);

// The stationary distribution of a primitive doubly stochastic chain,
// which is always uniform; verified against mu M = mu and against power
// iteration before returning. Throws for non-primitive input.
std::vector<double> stationary_distribution(const DoublyStochasticMatrix& m);

// Entrywise L1 distance sum_ij |m1_ij - m2_ij|.
double entrywise_l1_distance(const DoublyStochasticMatrix& m1, const DoublyStochasticMatrix& m2);

// Upper bound ||M1 - M2||_1 + d * dist_ab on the Wasserstein distance
// between the two matrix-transformed D-norms.
double continuity_bound(const DoublyStochasticMatrix& m1, const DoublyStochasticMatrix& m2,
                        double dist_ab);

// Parses a matrix from CSV (d rows of d comma-separated entries) or a
// JSON array of arrays; the format is sniffed from the content.
DoublyStochasticMatrix read_matrix(std::istream& in, double tol = 1e-10);
DoublyStochasticMatrix read_matrix_file(const std::string& path, double tol = 1e-10);

}  // namespace dnorm
