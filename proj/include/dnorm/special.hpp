// Special functions: log-gamma / gamma (Lanczos), beta, regularized
// incomplete beta, KS critical values.
#pragma once

#include <cstddef>

namespace dnorm {

// Lanczos approximation (g = 7, 9 terms). Relative error below 1e-12
// for x in (0, 172); throws for x <= 0 and non-positive-integer poles.
double lgamma_fn(double x);
double gamma_fn(double x);

// Beta function B(a,b) for a,b > 0.
double beta_fn(double a, double b);

// Regularized incomplete beta I_x(a,b) via Lentz continued fraction.
// a,b > 0, x in [0,1]; relative error <= 1e-10.
double reg_inc_beta(double a, double b, double x);

// One-sample Kolmogorov-Smirnov critical value (Stephens' small-sample
// correction). level must be one of 0.10, 0.05, 0.01.
double ks_critical_value(std::size_t n, double level);

}  // namespace dnorm
