// Exact closed-form norms and the standard max-stable distribution
// function. All functions are pure and thread-safe.
#pragma once

#include <limits>
#include <span>

#include "dnorm/common.hpp"

namespace dnorm {

double sup_norm(std::span<const double> x);
double l1_norm(std::span<const double> x);

// (sum |x_i|^lambda)^(1/lambda) for lambda in [1, inf]. lambda = 1 is the
// L1 norm; the sentinel lambda = +infinity dispatches to the sup-norm,
// which avoids overflow in the power formula. Rejects lambda < 1.
double logistic_norm(std::span<const double> x, double lambda);

inline constexpr double kLambdaSupSentinel = std::numeric_limits<double>::infinity();

// G(x) = exp(-dnorm_value) for x <= 0 componentwise, the value at x of
// the standard max-stable df whose norm evaluates to dnorm_value.
double sms_df(std::span<const double> x, double dnorm_value);

enum class TakahashiClass { complete_dependence, independence, intermediate };

// Classifies an extremal coefficient in [1, d]: d means independent
// margins, 1 means completely dependent margins.
TakahashiClass takahashi_classify(double extremal_coeff, int d, double tol);

const char* to_string(TakahashiClass c);

}  // namespace dnorm
