#include "dnorm/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dnorm/special.hpp"

namespace dnorm {

DiscreteMeasure DiscreteMeasure::validate(int d, std::vector<std::vector<double>> atoms,
                                          std::vector<double> weights) {
  if (d < 1) throw std::invalid_argument("discrete measure: d must be >= 1");
  if (atoms.empty()) throw std::invalid_argument("discrete measure: no atoms");
  if (atoms.size() != weights.size()) {
    throw std::invalid_argument("discrete measure: atom/weight count mismatch");
  }
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const auto& a = atoms[k];
    if (static_cast<int>(a.size()) != d) {
      throw std::invalid_argument("discrete measure: atom " + std::to_string(k) +
                                  " has wrong dimension");
    }
    double l1 = 0.0;
    for (double v : a) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("discrete measure: atom " + std::to_string(k) +
                                    " has a negative or non-finite entry");
      }
      l1 += v;
    }
    if (std::abs(l1 - d) > 1e-9) {
      throw std::invalid_argument("discrete measure: atom " + std::to_string(k) +
                                  " is off the simplex, ||atom||_1 = " + std::to_string(l1));
    }
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("discrete measure: weights must be nonnegative");
    }
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw std::invalid_argument("discrete measure: weights sum to " + std::to_string(wsum) +
                                ", expected 1");
  }
  DiscreteMeasure m;
  m.d = d;
  m.atoms = std::move(atoms);
  m.weights = std::move(weights);
  return m;
}

std::vector<double> DiscreteMeasure::barycenter() const {
  std::vector<double> b(d, 0.0);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    for (int i = 0; i < d; ++i) b[i] += weights[k] * atoms[k][i];
  }
  return b;
}

std::string to_json(const DiscreteMeasure& m) {
  nlohmann::json j;
  j["d"] = m.d;
  j["atoms"] = m.atoms;
  j["weights"] = m.weights;
  return j.dump();
}

DiscreteMeasure discrete_measure_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  return DiscreteMeasure::validate(j.at("d").get<int>(),
                                   j.at("atoms").get<std::vector<std::vector<double>>>(),
                                   j.at("weights").get<std::vector<double>>());
}

struct GeneratorSpec::Node {
  Kind kind;
  int d = 0;
  double lambda = 0.0;          // frechet_logistic
  double inv_gamma = 0.0;       // 1 / Gamma(1 - 1/lambda), precomputed
  double alpha = 0.0;           // dirichlet
  std::shared_ptr<const Node> a, b;  // product factors / matrix inner (a)
  std::shared_ptr<const DoublyStochasticMatrix> matrix;
  std::shared_ptr<const DiscreteMeasure> measure;
  std::vector<double> cum_weights;  // discrete sampling CDF
};

GeneratorSpec GeneratorSpec::constant(int d) {
  if (d < 1) throw std::invalid_argument("generator: d must be >= 1");
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->d = d;
  return GeneratorSpec(std::move(n));
}

GeneratorSpec GeneratorSpec::scaled_permutation(int d) {
  if (d < 1) throw std::invalid_argument("generator: d must be >= 1");
  auto n = std::make_shared<Node>();
  n->kind = Kind::scaled_permutation;
  n->d = d;
  return GeneratorSpec(std::move(n));
}

GeneratorSpec GeneratorSpec::frechet_logistic(int d, double lambda) {
  if (d < 1) throw std::invalid_argument("generator: d must be >= 1");
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("frechet_logistic: lambda must be finite and > 1");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::frechet_logistic;
  n->d = d;
  n->lambda = lambda;
  n->inv_gamma = 1.0 / gamma_fn(1.0 - 1.0 / lambda);
  return GeneratorSpec(std::move(n));
}

GeneratorSpec GeneratorSpec::dirichlet(int d, double alpha) {
  if (d < 1) throw std::invalid_argument("generator: d must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("dirichlet: alpha must be finite and > 0");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::dirichlet;
  n->d = d;
  n->alpha = alpha;
  return GeneratorSpec(std::move(n));
}

GeneratorSpec GeneratorSpec::uniform_spacings(int d) {
  if (d < 2) throw std::invalid_argument("uniform_spacings: d must be >= 2");
  auto n = std::make_shared<Node>();
  n->kind = Kind::uniform_spacings;
  n->d = d;
  return GeneratorSpec(std::move(n));
}

GeneratorSpec GeneratorSpec::product(const GeneratorSpec& a, const GeneratorSpec& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("product: dimension mismatch");
  auto n = std::make_shared<Node>();
  n->kind = Kind::product;
  n->d = a.dim();
  n->a = a.node_;
  n->b = b.node_;
  return GeneratorSpec(std::move(n));
}

GeneratorSpec GeneratorSpec::matrix_transformed(const DoublyStochasticMatrix& m,
                                                const GeneratorSpec& inner) {
  if (m.dim() != inner.dim()) {
    throw std::invalid_argument("matrix_transformed: dimension mismatch");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::matrix_transformed;
  n->d = inner.dim();
  n->a = inner.node_;
  n->matrix = std::make_shared<DoublyStochasticMatrix>(m);
  return GeneratorSpec(std::move(n));
}

GeneratorSpec GeneratorSpec::discrete(DiscreteMeasure measure) {
  const auto bary = measure.barycenter();
  for (int i = 0; i < measure.d; ++i) {
    if (std::abs(bary[i] - 1.0) > 1e-9) {
      throw std::invalid_argument(
          "discrete generator: barycenter component " + std::to_string(i) + " is " +
          std::to_string(bary[i]) + ", expected 1 (measure does not have unit component means)");
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::discrete;
  n->d = measure.d;
  n->measure = std::make_shared<DiscreteMeasure>(std::move(measure));
  n->cum_weights.reserve(n->measure->weights.size());
  double acc = 0.0;
  for (double w : n->measure->weights) {
    acc += w;
    n->cum_weights.push_back(acc);
  }
  n->cum_weights.back() = 1.0;  // guard the CDF tail against rounding
  return GeneratorSpec(std::move(n));
}

GeneratorSpec::Kind GeneratorSpec::kind() const { return node_->kind; }
int GeneratorSpec::dim() const { return node_->d; }

double GeneratorSpec::frechet_lambda() const {
  if (node_->kind != Kind::frechet_logistic) {
    throw std::logic_error("frechet_lambda: wrong generator kind");
  }
  return node_->lambda;
}

double GeneratorSpec::dirichlet_alpha() const {
  if (node_->kind != Kind::dirichlet) throw std::logic_error("dirichlet_alpha: wrong kind");
  return node_->alpha;
}

GeneratorSpec GeneratorSpec::factor(int i) const {
  if (node_->kind != Kind::product) throw std::logic_error("factor: wrong kind");
  if (i == 0) return GeneratorSpec(node_->a);
  if (i == 1) return GeneratorSpec(node_->b);
  throw std::out_of_range("factor index");
}

GeneratorSpec GeneratorSpec::inner() const {
  if (node_->kind != Kind::matrix_transformed) throw std::logic_error("inner: wrong kind");
  return GeneratorSpec(node_->a);
}

const DoublyStochasticMatrix& GeneratorSpec::matrix() const {
  if (!node_->matrix) throw std::logic_error("matrix: wrong kind");
  return *node_->matrix;
}

const DiscreteMeasure& GeneratorSpec::measure() const {
  if (!node_->measure) throw std::logic_error("measure: wrong kind");
  return *node_->measure;
}

std::string GeneratorSpec::description() const {
  std::ostringstream os;
  switch (node_->kind) {
    case Kind::constant:
      os << "constant(d=" << node_->d << ")";
      break;
    case Kind::scaled_permutation:
      os << "scaled_permutation(d=" << node_->d << ")";
      break;
    case Kind::frechet_logistic:
      os << "frechet_logistic(d=" << node_->d << ", lambda=" << node_->lambda << ")";
      break;
    case Kind::dirichlet:
      os << "dirichlet(d=" << node_->d << ", alpha=" << node_->alpha << ")";
      break;
    case Kind::uniform_spacings:
      os << "uniform_spacings(d=" << node_->d << ")";
      break;
    case Kind::product:
      os << "product(" << GeneratorSpec(node_->a).description() << ", "
         << GeneratorSpec(node_->b).description() << ")";
      break;
    case Kind::matrix_transformed:
      os << "matrix_transformed(d=" << node_->d << ", "
         << GeneratorSpec(node_->a).description() << ")";
      break;
    case Kind::discrete:
      os << "discrete(d=" << node_->d << ", atoms=" << node_->measure->support_size() << ")";
      break;
  }
  return os.str();
}

bool operator==(const GeneratorSpec& a, const GeneratorSpec& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->kind != b.node_->kind || a.node_->d != b.node_->d) return false;
  switch (a.node_->kind) {
    case GeneratorSpec::Kind::constant:
    case GeneratorSpec::Kind::scaled_permutation:
    case GeneratorSpec::Kind::uniform_spacings:
      return true;
    case GeneratorSpec::Kind::frechet_logistic:
      return a.node_->lambda == b.node_->lambda;
    case GeneratorSpec::Kind::dirichlet:
      return a.node_->alpha == b.node_->alpha;
    case GeneratorSpec::Kind::product:
      return GeneratorSpec(a.node_->a) == GeneratorSpec(b.node_->a) &&
             GeneratorSpec(a.node_->b) == GeneratorSpec(b.node_->b);
    case GeneratorSpec::Kind::matrix_transformed:
      return a.node_->matrix->data() == b.node_->matrix->data() &&
             GeneratorSpec(a.node_->a) == GeneratorSpec(b.node_->a);
    case GeneratorSpec::Kind::discrete:
      return a.node_->measure->atoms == b.node_->measure->atoms &&
             a.node_->measure->weights == b.node_->measure->weights;
  }
  return false;
}

void GeneratorSpec::sample_into(Rng& rng, std::vector<double>& out) const {
  const Node& n = *node_;
  out.resize(n.d);
  switch (n.kind) {
    case Kind::constant: {
      std::fill(out.begin(), out.end(), 1.0);
      return;
    }
    case Kind::scaled_permutation: {
      std::fill(out.begin(), out.end(), 0.0);
      const auto j = rng.uniform_below(static_cast<std::uint64_t>(n.d));
      out[static_cast<std::size_t>(j)] = static_cast<double>(n.d);
      return;
    }
    case Kind::frechet_logistic: {
      // X_i = (-ln U_i)^(-1/lambda) is Frechet(lambda); dividing by
      // Gamma(1 - 1/lambda) gives unit means.
      for (int i = 0; i < n.d; ++i) {
        const double e = -std::log(rng.uniform01());
        out[i] = std::pow(e, -1.0 / n.lambda) * n.inv_gamma;
      }
      return;
    }
    case Kind::dirichlet: {
      double sum = 0.0;
      for (int i = 0; i < n.d; ++i) {
        out[i] = rng.gamma(n.alpha);
        sum += out[i];
      }
      if (sum <= 0.0) {
        // All gamma variates underflowed; vanishing-probability event
        // for alpha not absurdly small. Treat as degenerate.
        throw numerical_error("dirichlet sample: gamma variates summed to zero");
      }
      const double scale = static_cast<double>(n.d) / sum;
      for (int i = 0; i < n.d; ++i) out[i] *= scale;
      return;
    }
    case Kind::uniform_spacings: {
      std::vector<double> u(static_cast<std::size_t>(n.d) - 1);
      for (auto& v : u) v = rng.uniform01();
      std::sort(u.begin(), u.end());
      double prev = 0.0;
      for (int i = 0; i + 1 < n.d; ++i) {
        out[i] = static_cast<double>(n.d) * (u[i] - prev);
        prev = u[i];
      }
      out[n.d - 1] = static_cast<double>(n.d) * (1.0 - prev);
      return;
    }
    case Kind::product: {
      GeneratorSpec(n.a).sample_into(rng, out);
      std::vector<double> zb;
      GeneratorSpec(n.b).sample_into(rng, zb);
      for (int i = 0; i < n.d; ++i) out[i] *= zb[i];
      return;
    }
    case Kind::matrix_transformed: {
      std::vector<double> z;
      GeneratorSpec(n.a).sample_into(rng, z);
      n.matrix->apply(z, out);
      return;
    }
    case Kind::discrete: {
      const double u = rng.uniform01();
      const auto it = std::lower_bound(n.cum_weights.begin(), n.cum_weights.end(), u);
      const auto k = static_cast<std::size_t>(it - n.cum_weights.begin());
      out = n.measure->atoms[k];
      return;
    }
  }
}

std::vector<double> GeneratorSpec::sample(Rng& rng) const {
  std::vector<double> out;
  sample_into(rng, out);
  return out;
}

GeneratorSpec product(const GeneratorSpec& a, const GeneratorSpec& b) {
  return GeneratorSpec::product(a, b);
}

GeneratorSpec matrix_apply(const DoublyStochasticMatrix& m, const GeneratorSpec& spec) {
  return GeneratorSpec::matrix_transformed(m, spec);
}

DiscreteMeasure standardize(const GeneratorSpec& spec, long long n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("standardize: n must be >= 1");
  const int d = spec.dim();
  // Merge exactly-equal atoms as they arrive; map order keeps the
  // result deterministic.
  std::map<std::vector<double>, double> mass;
  std::vector<double> z;
  double total = 0.0;
  for (long long k = 0; k < n; ++k) {
    spec.sample_into(rng, z);
    double l1 = 0.0;
    for (double v : z) l1 += v;
    if (l1 <= 0.0) {
      throw numerical_error(
          "standardize: degenerate generator sample with ||Z||_1 = 0; the change of "
          "measure requires P(||Z||_1 > 0) = 1");
    }
    std::vector<double> atom(d);
    const double scale = static_cast<double>(d) / l1;
    for (int i = 0; i < d; ++i) atom[i] = z[i] * scale;
    mass[std::move(atom)] += l1;
    total += l1;
  }
  std::vector<std::vector<double>> atoms;
  std::vector<double> weights;
  atoms.reserve(mass.size());
  weights.reserve(mass.size());
  for (auto& [atom, w] : mass) {
    atoms.push_back(atom);
    weights.push_back(w / total);
  }
  // Renormalize the largest weight so the sum is exactly achievable.
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  const auto argmax = std::max_element(weights.begin(), weights.end());
  *argmax += 1.0 - wsum;
  return DiscreteMeasure::validate(d, std::move(atoms), std::move(weights));
}

GeneratorReport validate_generator(const GeneratorSpec& spec, long long n, Rng& rng,
                                   double z_threshold) {
  return validate_sampler([&spec](Rng& r, std::vector<double>& z) { spec.sample_into(r, z); },
                          spec.dim(), n, rng, z_threshold);
}

GeneratorReport validate_sampler(const std::function<void(Rng&, std::vector<double>&)>& sampler,
                                 int d, long long n, Rng& rng, double z_threshold) {
  if (n < 100) throw std::invalid_argument("validate_generator: n must be >= 100");
  std::vector<double> mean(d, 0.0), m2(d, 0.0), z;
  long long negatives = 0;
  for (long long k = 1; k <= n; ++k) {
    sampler(rng, z);
    for (int i = 0; i < d; ++i) {
      if (z[i] < 0.0) ++negatives;
      const double delta = z[i] - mean[i];
      mean[i] += delta / static_cast<double>(k);
      m2[i] += delta * (z[i] - mean[i]);
    }
  }
  GeneratorReport report;
  report.n_samples = n;
  report.negative_samples = negatives;
  report.components.resize(d);
  bool ok = negatives == 0;
  for (int i = 0; i < d; ++i) {
    auto& c = report.components[i];
    c.mean = mean[i];
    const double var = m2[i] / static_cast<double>(n - 1);
    c.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
    if (c.std_error == 0.0) {
      c.z_score = mean[i] == 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      c.z_score = (mean[i] - 1.0) / c.std_error;
    }
    // Absolute floor of 1e-13: a near-degenerate sampler (e.g. the M0
    // collapse) has SE at rounding scale, where z-scores are meaningless.
    c.flagged = std::abs(mean[i] - 1.0) > z_threshold * c.std_error + 1e-13;
    if (c.flagged) ok = false;
  }
  report.pass = ok;
  return report;
}

}  // namespace dnorm
