#pragma once

#include <span>
#include <stdexcept>

namespace wlr {

struct DegenerateVariance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
};

double mean(std::span<const double> xs);
double sample_sd(std::span<const double> xs);

// Paired two-sided t-test on matched samples. Throws std::invalid_argument on
// length mismatch or fewer than two pairs, DegenerateVariance when every
// difference is identical (zero variance).
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

double normal_cdf(double x);
double normal_quantile(double p);

}  // namespace wlr
