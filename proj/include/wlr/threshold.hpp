#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wlr/gp.hpp"

namespace wlr {

// Per-axis displacement limits in mm; the normalized model space is
// (x/lx_mm, z/lz_mm).
struct Limits {
  double lx_mm = 15.0;
  double lz_mm = 15.0;
  void validate() const;
};

struct TrialRecord {
  std::string subject;
  std::string condition;
  double x_err_mm = 0.0;
  double z_err_mm = 0.0;
  bool correct = false;
};

struct NormalizedPoint {
  double r = 0.0;
  double theta = 0.0;  // [0, 2*pi)
};

NormalizedPoint to_polar_normalized(double x_norm, double z_norm);
std::pair<double, double> from_polar_normalized(const NormalizedPoint& p);

Eigen::MatrixX2d normalize_trials(const std::vector<TrialRecord>& trials,
                                  const Limits& limits);
Eigen::VectorXd trial_targets(const std::vector<TrialRecord>& trials);

// Latent posterior evaluator: fills mu/var for a batch of normalized (x, z)
// query rows. Decouples the projection/threshold code from GpModel so tests
// can feed analytic surfaces.
using PosteriorFn =
    std::function<void(const Eigen::MatrixX2d&, Eigen::VectorXd&, Eigen::VectorXd&)>;

PosteriorFn model_posterior_fn(const GpModel& model);

struct ProjectedPosterior {
  double mu_hat = 0.0;
  double sd_hat = 0.0;
};

// Radial monotone projection: evaluate the posterior at radii r*i/m
// (i = 0..m) along the ray and push mean and 2-sigma band edges through a
// running max, yielding N(mu_hat, ((u-l)/4)^2).
ProjectedPosterior monotone_project(const PosteriorFn& posterior, double r,
                                    double theta, int m = 20);

// Probit predictive detection probability Phi(mu_hat / sqrt(1 + sd_hat^2)).
double detect_prob(const ProjectedPosterior& proj);

// Largest normalized radius along theta inside the [-1,1]^2 box.
double ray_limit(double theta);

// Bisection for detect_prob = p_target along the ray; nullopt when the
// probability never reaches the target inside the limits (censored), 0 when
// it is already at target at the origin. Tolerance 1e-4 of the ray length.
std::optional<double> threshold_radius(const PosteriorFn& posterior, double theta,
                                       double p_target = 0.75, int m = 20);

struct ThresholdContour {
  double p_target = 0.75;
  std::vector<std::pair<double, double>> vertices;  // (x_mm, z_mm), angle order
  std::vector<double> censored_angles;              // radians
  double area_mm2 = 0.0;
  std::pair<double, double> centroid{0.0, 0.0};
  bool fully_censored = false;
};

double polygon_area(const std::vector<std::pair<double, double>>& vertices);
std::pair<double, double> polygon_centroid(
    const std::vector<std::pair<double, double>>& vertices);

ThresholdContour extract_contour(const PosteriorFn& posterior, const Limits& limits,
                                 double p_target = 0.75, int n_angles = 64,
                                 int m = 20);
ThresholdContour extract_contour_serial(const PosteriorFn& posterior,
                                        const Limits& limits, double p_target = 0.75,
                                        int n_angles = 64, int m = 20);

// Normalize, optimize hyperparameters and fit: the one-call path from a
// trial log to a queryable model.
std::pair<GpModel, GpHyperparams> fit_response_model(
    const std::vector<TrialRecord>& trials, const Limits& limits,
    const GpHyperparams& warm_start = {});

}  // namespace wlr
