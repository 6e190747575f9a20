#include "wlr/threshold.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "wlr/stats.hpp"

namespace wlr {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void Limits::validate() const {
  if (!(lx_mm > 0.0) || !(lz_mm > 0.0))
    throw std::invalid_argument("Limits: axis limits must be positive");
}

NormalizedPoint to_polar_normalized(double x_norm, double z_norm) {
  NormalizedPoint p;
  p.r = std::hypot(x_norm, z_norm);
  p.theta = std::atan2(z_norm, x_norm);
  if (p.theta < 0.0) p.theta += kTwoPi;
  return p;
}

std::pair<double, double> from_polar_normalized(const NormalizedPoint& p) {
  return {p.r * std::cos(p.theta), p.r * std::sin(p.theta)};
}

Eigen::MatrixX2d normalize_trials(const std::vector<TrialRecord>& trials,
                                  const Limits& limits) {
  limits.validate();
  Eigen::MatrixX2d x(trials.size(), 2);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (!std::isfinite(trials[i].x_err_mm) || !std::isfinite(trials[i].z_err_mm))
      throw std::invalid_argument("normalize_trials: non-finite displacement");
    x(static_cast<Eigen::Index>(i), 0) = trials[i].x_err_mm / limits.lx_mm;
    x(static_cast<Eigen::Index>(i), 1) = trials[i].z_err_mm / limits.lz_mm;
  }
  return x;
}

Eigen::VectorXd trial_targets(const std::vector<TrialRecord>& trials) {
  Eigen::VectorXd y(trials.size());
  for (std::size_t i = 0; i < trials.size(); ++i)
    y[static_cast<Eigen::Index>(i)] = trials[i].correct ? 1.0 : -1.0;
  return y;
}

PosteriorFn model_posterior_fn(const GpModel& model) {
  return [&model](const Eigen::MatrixX2d& q, Eigen::VectorXd& mu,
                  Eigen::VectorXd& var) { model.posterior(q, mu, var); };
}

ProjectedPosterior monotone_project(const PosteriorFn& posterior, double r,
                                    double theta, int m) {
  if (!(r >= 0.0)) throw std::invalid_argument("monotone_project: r must be >= 0");
  if (m < 1) throw std::invalid_argument("monotone_project: m must be >= 1");
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::MatrixX2d pts(m + 1, 2);
  for (int i = 0; i <= m; ++i) {
    const double ri = r * i / m;
    pts(i, 0) = ri * c;
    pts(i, 1) = ri * s;
  }
  Eigen::VectorXd mu, var;
  posterior(pts, mu, var);
  const Eigen::ArrayXd sd = var.array().max(0.0).sqrt();
  ProjectedPosterior proj;
  proj.mu_hat = mu.maxCoeff();
  const double l = (mu.array() - 2.0 * sd).maxCoeff();
  const double u = (mu.array() + 2.0 * sd).maxCoeff();
  proj.sd_hat = (u - l) / 4.0;
  return proj;
}

double detect_prob(const ProjectedPosterior& proj) {
  return normal_cdf(proj.mu_hat / std::sqrt(1.0 + proj.sd_hat * proj.sd_hat));
}

double ray_limit(double theta) {
  const double c = std::abs(std::cos(theta));
  const double s = std::abs(std::sin(theta));
  const double inf = std::numeric_limits<double>::infinity();
  return std::min(c > 1e-12 ? 1.0 / c : inf, s > 1e-12 ? 1.0 / s : inf);
}

std::optional<double> threshold_radius(const PosteriorFn& posterior, double theta,
                                       double p_target, int m) {
  if (!(p_target > 0.5 && p_target < 1.0))
    throw std::invalid_argument("threshold_radius: p_target must be in (0.5, 1)");
  const double rm = ray_limit(theta);
  if (detect_prob(monotone_project(posterior, rm, theta, m)) < p_target)
    return std::nullopt;  // censored: never reaches target inside the box
  if (detect_prob(monotone_project(posterior, 0.0, theta, m)) >= p_target)
    return 0.0;
  double lo = 0.0, hi = rm;
  for (int iter = 0; iter < 30; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (detect_prob(monotone_project(posterior, mid, theta, m)) >= p_target)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-4 * rm) break;
  }
  return 0.5 * (lo + hi);
}

double polygon_area(const std::vector<std::pair<double, double>>& vertices) {
  if (vertices.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& [x0, z0] = vertices[i];
    const auto& [x1, z1] = vertices[(i + 1) % vertices.size()];
    twice += x0 * z1 - x1 * z0;
  }
  return 0.5 * std::abs(twice);
}

std::pair<double, double> polygon_centroid(
    const std::vector<std::pair<double, double>>& vertices) {
  if (vertices.empty()) return {0.0, 0.0};
  double twice = 0.0, cx = 0.0, cz = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& [x0, z0] = vertices[i];
    const auto& [x1, z1] = vertices[(i + 1) % vertices.size()];
    const double cross = x0 * z1 - x1 * z0;
    twice += cross;
    cx += (x0 + x1) * cross;
    cz += (z0 + z1) * cross;
  }
  if (std::abs(twice) < 1e-12) {  // degenerate: fall back to the vertex mean
    for (const auto& [x, z] : vertices) {
      cx += x;
      cz += z;
    }
    return {cx / static_cast<double>(vertices.size()),
            cz / static_cast<double>(vertices.size())};
  }
  return {cx / (3.0 * twice), cz / (3.0 * twice)};
}

namespace {

ThresholdContour assemble_contour(const std::vector<std::optional<double>>& radii,
                                  const Limits& limits, double p_target,
                                  int n_angles) {
  ThresholdContour contour;
  contour.p_target = p_target;
  for (int k = 0; k < n_angles; ++k) {
    const double theta = kTwoPi * k / n_angles;
    if (radii[static_cast<std::size_t>(k)]) {
      const double r = *radii[static_cast<std::size_t>(k)];
      contour.vertices.emplace_back(r * std::cos(theta) * limits.lx_mm,
                                    r * std::sin(theta) * limits.lz_mm);
    } else {
      contour.censored_angles.push_back(theta);
    }
  }
  contour.fully_censored =
      contour.censored_angles.size() * 4 > static_cast<std::size_t>(n_angles) ||
      contour.vertices.size() < 3;
  if (!contour.fully_censored) {
    contour.area_mm2 = polygon_area(contour.vertices);
    contour.centroid = polygon_centroid(contour.vertices);
  }
  return contour;
}

std::vector<std::optional<double>> make_radius_slots(int n_angles, int m) {
  if (n_angles < 8) throw std::invalid_argument("extract_contour: n_angles must be >= 8");
  if (m < 1) throw std::invalid_argument("extract_contour: m must be >= 1");
  return std::vector<std::optional<double>>(static_cast<std::size_t>(n_angles));
}

}  // namespace

ThresholdContour extract_contour(const PosteriorFn& posterior, const Limits& limits,
                                 double p_target, int n_angles, int m) {
  limits.validate();
  if (!(p_target > 0.5 && p_target < 1.0))
    throw std::invalid_argument("extract_contour: p_target must be in (0.5, 1)");
  auto radii = make_radius_slots(n_angles, m);
  std::exception_ptr error;  // exceptions must not unwind out of the omp region
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n_angles; ++k) {
    try {
      radii[static_cast<std::size_t>(k)] =
          threshold_radius(posterior, kTwoPi * k / n_angles, p_target, m);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return assemble_contour(radii, limits, p_target, n_angles);
}

ThresholdContour extract_contour_serial(const PosteriorFn& posterior,
                                        const Limits& limits, double p_target,
                                        int n_angles, int m) {
  limits.validate();
  auto radii = make_radius_slots(n_angles, m);
  for (int k = 0; k < n_angles; ++k)
    radii[static_cast<std::size_t>(k)] =
        threshold_radius(posterior, kTwoPi * k / n_angles, p_target, m);
  return assemble_contour(radii, limits, p_target, n_angles);
}

std::pair<GpModel, GpHyperparams> fit_response_model(
    const std::vector<TrialRecord>& trials, const Limits& limits,
    const GpHyperparams& warm_start) {
  if (trials.empty())
    throw std::invalid_argument("fit_response_model: need at least one trial");
  const Eigen::MatrixX2d x = normalize_trials(trials, limits);
  const Eigen::VectorXd y = trial_targets(trials);
  const GpHyperparams hp = optimize_hyperparams(x, y, warm_start);
  GpModel model;
  model.fit(x, y, hp);
  return {std::move(model), hp};
}

}  // namespace wlr
