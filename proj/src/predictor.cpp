#include "wlr/predictor.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace wlr {

void PredictorConfig::validate() const {
  if (!(sample_rate_hz > 0.0))
    throw std::invalid_argument("PredictorConfig: sample_rate_hz must be positive");
  if (window_samples < 5 || window_samples % 2 == 0)
    throw std::invalid_argument("PredictorConfig: window_samples must be odd and >= 5");
  if (!(horizon_ms >= 0.0))
    throw std::invalid_argument("PredictorConfig: horizon_ms must be >= 0");
}

Eigen::VectorXd predictor_weights(int window_samples, double dt_ms, double horizon_ms) {
  if (window_samples < 5 || window_samples % 2 == 0)
    throw std::invalid_argument("predictor_weights: window_samples must be odd and >= 5");
  if (!(dt_ms > 0.0)) throw std::invalid_argument("predictor_weights: dt_ms must be positive");
  const int w = window_samples;
  // Times relative to the last sample, scaled by the window span so the
  // normal equations stay well conditioned.
  const double span = (w - 1) * dt_ms;
  Eigen::MatrixXd design(w, 3);
  for (int j = 0; j < w; ++j) {
    const double u = (j - (w - 1)) * dt_ms / span;
    design(j, 0) = 1.0;
    design(j, 1) = u;
    design(j, 2) = u * u;
  }
  const Eigen::Matrix3d gram = design.transpose() * design;
  Eigen::LLT<Eigen::Matrix3d> llt(gram);
  if (llt.info() != Eigen::Success)
    throw IllConditioned("predictor_weights: singular design matrix");
  const double uh = horizon_ms / span;
  const Eigen::Vector3d eval(1.0, uh, uh * uh);
  // prediction = eval^T (G^-1 A^T y)  =>  weights = A G^-1 eval
  return design * llt.solve(eval);
}

Eigen::VectorXd predictor_weights(const PredictorConfig& config) {
  config.validate();
  return predictor_weights(config.window_samples, 1000.0 / config.sample_rate_hz,
                           config.horizon_ms);
}

double predict(std::span<const double> angles, const Eigen::VectorXd& weights) {
  const auto w = static_cast<std::size_t>(weights.size());
  if (angles.size() < w)
    throw InsufficientSamples("predict: fewer samples than the window");
  const double* tail = angles.data() + (angles.size() - w);
  return Eigen::Map<const Eigen::VectorXd>(tail, weights.size()).dot(weights);
}

double uniform_interval_ms(const std::vector<EncoderSample>& stream) {
  if (stream.size() < 2)
    throw InsufficientSamples("uniform_interval_ms: need at least two samples");
  const double dt = stream[1].t_ms - stream[0].t_ms;
  if (!(dt > 0.0)) throw NonUniformSampling("timestamps not strictly increasing");
  for (std::size_t i = 1; i + 1 < stream.size(); ++i) {
    const double d = stream[i + 1].t_ms - stream[i].t_ms;
    if (std::abs(d - dt) > 1e-6 * std::abs(dt))
      throw NonUniformSampling("timestamp spacing varies beyond 1e-6 relative");
  }
  return dt;
}

double predict(const std::vector<EncoderSample>& stream, const PredictorConfig& config) {
  config.validate();
  if (stream.size() < static_cast<std::size_t>(config.window_samples))
    throw InsufficientSamples("predict: stream shorter than the window");
  const double dt = uniform_interval_ms(stream);
  const Eigen::VectorXd w =
      predictor_weights(config.window_samples, dt, config.horizon_ms);
  std::vector<double> angles(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) angles[i] = stream[i].angle_deg;
  return predict(std::span<const double>(angles), w);
}

}  // namespace wlr
