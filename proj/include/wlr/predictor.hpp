#pragma once
// Quadratic least-squares forward extrapolation of a uniformly sampled
// rotary-encoder angle stream, packaged as a fixed weight vector over the
// trailing window so each prediction is a single dot product.

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace wlr {

struct IllConditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientSamples : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonUniformSampling : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PredictorConfig {
  double sample_rate_hz = 1000.0;
  int window_samples = 51;  // odd, >= 5
  double horizon_ms = 26.0;
  // Polynomial order is fixed at 2.

  void validate() const;
};

struct EncoderSample {
  double t_ms = 0.0;
  double angle_deg = 0.0;
};

// Weights of the quadratic fit over the trailing window evaluated at
// t_last + horizon; they sum to 1 (constant signals are reproduced exactly)
// and reproduce any degree-<=2 signal.
Eigen::VectorXd predictor_weights(const PredictorConfig& config);
// Same weights for an explicit sample interval (ms); used when the interval
// comes from measured timestamps rather than the nominal rate.
Eigen::VectorXd predictor_weights(int window_samples, double dt_ms, double horizon_ms);

// Dot product of the weights with the trailing window of `angles`.
double predict(std::span<const double> angles, const Eigen::VectorXd& weights);

// Validates strictly increasing, uniform (1e-6 relative) timestamps and
// returns the sample interval in ms.
double uniform_interval_ms(const std::vector<EncoderSample>& stream);

// Predicted angle at t_last + horizon for the full stream; throws
// InsufficientSamples when fewer than window_samples are available.
double predict(const std::vector<EncoderSample>& stream, const PredictorConfig& config);

}  // namespace wlr
