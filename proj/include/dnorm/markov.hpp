// The generator iteration Z(n) = M^n Z: estimates of ||x||_D(M^n Z) for
// n = 0..n_max. With a primitive doubly stochastic M the sequence
// approaches the sup-norm.
#pragma once

#include <span>
#include <vector>

#include "dnorm/doubly_stochastic.hpp"
#include "dnorm/montecarlo.hpp"

namespace dnorm {

// Entry n holds the estimate for matrix_apply(M^n, spec), all runs
// sharing cfg (equal seeds), so M = I gives a constant sequence.
// Primitivity of M is recommended but not required; without it the
// sequence need not converge.
std::vector<Estimate> iterate_generator(const DoublyStochasticMatrix& m,
                                        const GeneratorSpec& spec, int n_max,
                                        std::span<const double> x, const EstimationConfig& cfg);

// Max spread max_i,j,j' |M^n(i,j) - M^n(i,j')| of the rows of M^n; the
// distance of M^n Z from (1,...,1) is at most d times this for any
// generator with ||Z||_1 = d.
double row_spread(const DoublyStochasticMatrix& m);

}  // namespace dnorm
