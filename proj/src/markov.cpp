#include "dnorm/markov.hpp"

#include <algorithm>
#include <stdexcept>

namespace dnorm {

std::vector<Estimate> iterate_generator(const DoublyStochasticMatrix& m,
                                        const GeneratorSpec& spec, int n_max,
                                        std::span<const double> x, const EstimationConfig& cfg) {
  if (m.dim() != spec.dim()) throw std::invalid_argument("iterate_generator: dimension mismatch");
  if (static_cast<int>(x.size()) != spec.dim()) {
    throw std::invalid_argument("iterate_generator: point dimension mismatch");
  }
  if (n_max < 0) throw std::invalid_argument("iterate_generator: n_max must be >= 0");
  std::vector<Estimate> out;
  out.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    const GeneratorSpec transformed = matrix_apply(matrix_power(m, n), spec);
    out.push_back(estimate_dnorm(transformed, x, cfg));
  }
  return out;
}

double row_spread(const DoublyStochasticMatrix& m) {
  const int d = m.dim();
  double spread = 0.0;
  for (int i = 0; i < d; ++i) {
    double lo = m(i, 0), hi = m(i, 0);
    for (int j = 1; j < d; ++j) {
      lo = std::min(lo, m(i, j));
      hi = std::max(hi, m(i, j));
    }
    spread = std::max(spread, hi - lo);
  }
  return spread;
}

}  // namespace dnorm
