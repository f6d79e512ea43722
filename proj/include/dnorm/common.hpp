// Shared error types, constants and small numeric helpers.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace dnorm {

inline constexpr const char* kVersion = "0.1.0";

// Fixed default seed so bare invocations are reproducible.
inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEEULL;

// Raised when an algorithm fails numerically (non-convergence, interval
// too wide to decide, degenerate sample). Precondition violations use
// std::invalid_argument instead.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void validate_point(std::span<const double> x);          // finite entries, d >= 1
void validate_nonneg_vector(std::span<const double> x);  // finite and >= 0

}  // namespace dnorm
