#include "dnorm/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dnorm {

void validate_point(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("point must have dimension >= 1");
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("point entries must be finite");
  }
}

void validate_nonneg_vector(std::span<const double> x) {
  validate_point(x);
  for (double v : x) {
    if (v < 0.0) throw std::invalid_argument("vector entries must be nonnegative");
  }
}

double sup_norm(std::span<const double> x) {
  validate_point(x);
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double l1_norm(std::span<const double> x) {
  validate_point(x);
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double logistic_norm(std::span<const double> x, double lambda) {
  validate_point(x);
  if (std::isnan(lambda) || lambda < 1.0) {
    throw std::invalid_argument("logistic_norm: lambda must satisfy lambda >= 1");
  }
  if (std::isinf(lambda)) return sup_norm(x);
  if (lambda == 1.0) return l1_norm(x);
  // Scale by the sup-norm so |x_i/m|^lambda cannot overflow.
  const double m = sup_norm(x);
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v) / m, lambda);
  return m * std::pow(s, 1.0 / lambda);
}

double sms_df(std::span<const double> x, double dnorm_value) {
  validate_point(x);
  for (double v : x) {
    if (v > 0.0) throw std::invalid_argument("sms_df: x must be <= 0 componentwise");
  }
  if (!(dnorm_value >= 0.0) || !std::isfinite(dnorm_value)) {
    throw std::invalid_argument("sms_df: norm value must be finite and >= 0");
  }
  return std::exp(-dnorm_value);
}

TakahashiClass takahashi_classify(double extremal_coeff, int d, double tol) {
  if (d < 1) throw std::invalid_argument("takahashi_classify: d must be >= 1");
  if (!(tol >= 0.0)) throw std::invalid_argument("takahashi_classify: tol must be >= 0");
  if (!(extremal_coeff >= 1.0 - tol) || !(extremal_coeff <= static_cast<double>(d) + tol)) {
    throw std::invalid_argument(
        "takahashi_classify: extremal coefficient " + std::to_string(extremal_coeff) +
        " outside [1, d] up to tol");
  }
  if (std::abs(extremal_coeff - static_cast<double>(d)) <= tol) {
    return TakahashiClass::independence;
  }
  if (std::abs(extremal_coeff - 1.0) <= tol) {
    return TakahashiClass::complete_dependence;
  }
  return TakahashiClass::intermediate;
}

const char* to_string(TakahashiClass c) {
  switch (c) {
    case TakahashiClass::complete_dependence:
      return "complete_dependence";
    case TakahashiClass::independence:
      return "independence";
    case TakahashiClass::intermediate:
      return "intermediate";
  }
  return "unknown";
}

}  // namespace dnorm
