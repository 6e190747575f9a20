#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "wlr/rng.hpp"
#include "wlr/stats.hpp"
#include "wlr/threshold.hpp"

using namespace wlr;

namespace {

constexpr double kPi = std::numbers::pi;

// Analytic latent surface mu = alpha*(|x,z| - r0), constant variance.
PosteriorFn radial_posterior(double alpha, double r0, double var) {
  return [=](const Eigen::MatrixX2d& q, Eigen::VectorXd& mu, Eigen::VectorXd& v) {
    mu.resize(q.rows());
    v.resize(q.rows());
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      mu(i) = alpha * (std::hypot(q(i, 0), q(i, 1)) - r0);
      v(i) = var;
    }
  };
}

double regular_polygon_factor(int n) { return 0.5 * n * std::sin(2.0 * kPi / n); }

std::vector<TrialRecord> circle_rule_trials(double boundary_mm, double limit_mm,
                                            int per_axis) {
  std::vector<TrialRecord> trials;
  for (int i = 0; i < per_axis; ++i) {
    for (int j = 0; j < per_axis; ++j) {
      TrialRecord t;
      t.subject = "s";
      t.condition = "c";
      t.x_err_mm = -limit_mm + 2.0 * limit_mm * i / (per_axis - 1);
      t.z_err_mm = -limit_mm + 2.0 * limit_mm * j / (per_axis - 1);
      t.correct = std::hypot(t.x_err_mm, t.z_err_mm) > boundary_mm;
      trials.push_back(t);
    }
  }
  return trials;
}

}  // namespace

TEST_SUITE("threshold") {

TEST_CASE("polar normalization: quadrant anchors and roundtrip") {
  const NormalizedPoint right = to_polar_normalized(1.0, 0.0);
  CHECK(right.r == 1.0);
  CHECK(right.theta == 0.0);
  const NormalizedPoint left = to_polar_normalized(-1.0, 0.0);
  CHECK(left.theta == doctest::Approx(kPi).epsilon(1e-14));
  const NormalizedPoint down = to_polar_normalized(0.0, -1.0);
  CHECK(down.theta == doctest::Approx(1.5 * kPi).epsilon(1e-14));

  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const double x = -1.0 + 2.0 * rng.uniform01();
    const double z = -1.0 + 2.0 * rng.uniform01();
    const NormalizedPoint p = to_polar_normalized(x, z);
    CHECK(p.theta >= 0.0);
    CHECK(p.theta < 2.0 * kPi);
    const auto [xr, zr] = from_polar_normalized(p);
    CHECK(xr == doctest::Approx(x).epsilon(1e-12));
    CHECK(zr == doctest::Approx(z).epsilon(1e-12));
  }
}

TEST_CASE("trial normalization divides by the per-axis limits") {
  std::vector<TrialRecord> trials(2);
  trials[0].x_err_mm = 7.5;
  trials[0].z_err_mm = -15.0;
  trials[0].correct = true;
  trials[1].x_err_mm = -3.0;
  trials[1].z_err_mm = 5.0;
  trials[1].correct = false;
  const Eigen::MatrixX2d x = normalize_trials(trials, Limits{15.0, 10.0});
  CHECK(x(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(x(0, 1) == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(x(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
  const Eigen::VectorXd y = trial_targets(trials);
  CHECK(y(0) == 1.0);
  CHECK(y(1) == -1.0);

  trials[0].x_err_mm = std::nan("");
  CHECK_THROWS_AS(normalize_trials(trials, Limits{}), std::invalid_argument);
  CHECK_THROWS_AS(normalize_trials({}, Limits{-1.0, 15.0}), std::invalid_argument);
}

TEST_CASE("monotone projection is the identity on monotone posteriors") {
  const PosteriorFn post = radial_posterior(2.0, 0.4, 0.09);
  for (double r : {0.0, 0.2, 0.55, 1.1}) {
    for (double theta : {0.0, 0.7, 2.9, 5.6}) {
      const ProjectedPosterior proj = monotone_project(post, r, theta);
      CHECK(proj.mu_hat == doctest::Approx(2.0 * (r - 0.4)).epsilon(1e-12));
      CHECK(proj.sd_hat == doctest::Approx(0.3).epsilon(1e-12));
    }
  }
}

TEST_CASE("monotone projection dominates the raw mean on wiggly posteriors") {
  // mu oscillates in r; the running max can only sit on or above it.
  const PosteriorFn wiggle = [](const Eigen::MatrixX2d& q, Eigen::VectorXd& mu,
                                Eigen::VectorXd& v) {
    mu.resize(q.rows());
    v.resize(q.rows());
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      const double r = std::hypot(q(i, 0), q(i, 1));
      mu(i) = std::sin(7.0 * r);
      v(i) = 0.25;
    }
  };
  for (double r = 0.05; r <= 1.3; r += 0.05) {
    const ProjectedPosterior proj = monotone_project(wiggle, r, 1.1);
    CHECK(proj.mu_hat >= std::sin(7.0 * r) - 1e-12);
    CHECK(proj.sd_hat >= 0.0);
  }
  // and it finds interior maxima that plain endpoint evaluation misses
  const ProjectedPosterior past_peak = monotone_project(wiggle, 1.0, 0.0);
  CHECK(past_peak.mu_hat > 0.98);  // grid point nearest the sin peak
}

TEST_CASE("projection argument validation") {
  const PosteriorFn post = radial_posterior(1.0, 0.5, 0.0);
  CHECK_THROWS_AS(monotone_project(post, -0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(monotone_project(post, 0.5, 0.0, 0), std::invalid_argument);
}

TEST_CASE("detect_prob applies the probit link with variance inflation") {
  ProjectedPosterior proj;
  proj.mu_hat = 0.6744897501960817;
  proj.sd_hat = 0.0;
  CHECK(detect_prob(proj) == doctest::Approx(0.75).epsilon(1e-12));
  proj.sd_hat = 1.0;
  CHECK(detect_prob(proj) ==
        doctest::Approx(normal_cdf(0.6744897501960817 / std::sqrt(2.0))).epsilon(1e-12));
  // inflation pulls probabilities toward 0.5
  CHECK(detect_prob(proj) < 0.75);
}

TEST_CASE("ray limit of the unit box") {
  CHECK(ray_limit(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ray_limit(kPi / 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ray_limit(kPi) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ray_limit(kPi / 4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ray_limit(3 * kPi / 4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // every ray stays within the box diagonal
  for (double theta = 0.0; theta < 2 * kPi; theta += 0.01) {
    const double rm = ray_limit(theta);
    CHECK(rm >= 1.0 - 1e-12);
    CHECK(rm <= std::sqrt(2.0) + 1e-12);
  }
}

TEST_CASE("threshold radius: analytic crossing, origin, and censoring") {
  // sigma = 0: crossing at r0 + Phi^-1(p)/alpha.
  const double alpha = 3.0, r0 = 0.4;
  const double q75 = 0.6744897501960817;
  const PosteriorFn sharp = radial_posterior(alpha, r0, 0.0);
  const auto r = threshold_radius(sharp, 0.3, 0.75);
  REQUIRE(r.has_value());
  CHECK(*r == doctest::Approx(r0 + q75 / alpha).epsilon(2e-4));

  // constant variance inflates the link, pushing the crossing outward.
  const PosteriorFn soft = radial_posterior(alpha, r0, 0.5625);
  const auto r_soft = threshold_radius(soft, 0.3, 0.75);
  REQUIRE(r_soft.has_value());
  CHECK(*r_soft ==
        doctest::Approx(r0 + q75 * std::sqrt(1.5625) / alpha).epsilon(2e-4));

  // already above target at the origin
  const auto at_origin = threshold_radius(radial_posterior(1.0, -10.0, 0.0), 1.0);
  REQUIRE(at_origin.has_value());
  CHECK(*at_origin == 0.0);

  // never reaches target inside the box
  CHECK_FALSE(threshold_radius(radial_posterior(1.0, 10.0, 0.0), 1.0).has_value());

  CHECK_THROWS_AS(threshold_radius(sharp, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(threshold_radius(sharp, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("polygon area and centroid: fixtures and orientation invariance") {
  const std::vector<std::pair<double, double>> square{
      {0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  CHECK(polygon_area(square) == doctest::Approx(1.0).epsilon(1e-14));
  const auto [cx, cz] = polygon_centroid(square);
  CHECK(cx == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cz == doctest::Approx(0.5).epsilon(1e-14));

  std::vector<std::pair<double, double>> reversed(square.rbegin(), square.rend());
  CHECK(polygon_area(reversed) == doctest::Approx(1.0).epsilon(1e-14));
  const auto [rx, rz] = polygon_centroid(reversed);
  CHECK(rx == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(rz == doctest::Approx(0.5).epsilon(1e-14));

  const std::vector<std::pair<double, double>> tri{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  CHECK(polygon_area(tri) == doctest::Approx(0.5).epsilon(1e-14));

  CHECK(polygon_area({{0.0, 0.0}, {1.0, 1.0}}) == 0.0);
  // collinear points: degenerate centroid falls back to the vertex mean
  const auto [dx, dz] = polygon_centroid({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}});
  CHECK(dx == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dz == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("contour extraction recovers an analytic circle, scaled per axis") {
  const double alpha = 4.0, r0 = 0.5;
  const double q75 = 0.6744897501960817;
  const double r_star = r0 + q75 / alpha;  // ~0.669 normalized
  const PosteriorFn post = radial_posterior(alpha, r0, 0.0);

  const Limits limits{15.0, 10.0};
  const ThresholdContour contour = extract_contour(post, limits, 0.75, 64);
  CHECK_FALSE(contour.fully_censored);
  CHECK(contour.censored_angles.empty());
  REQUIRE(contour.vertices.size() == 64);
  for (std::size_t k = 0; k < contour.vertices.size(); ++k) {
    const double theta = 2.0 * kPi * k / 64;
    const auto& [x, z] = contour.vertices[k];
    CHECK(x == doctest::Approx(r_star * std::cos(theta) * 15.0).epsilon(3e-4));
    CHECK(z == doctest::Approx(r_star * std::sin(theta) * 10.0).epsilon(3e-4));
  }
  // ellipse area with the 64-gon discretization factor
  const double expected = regular_polygon_factor(64) * (r_star * 15.0) * (r_star * 10.0);
  CHECK(contour.area_mm2 == doctest::Approx(expected).epsilon(1e-3));
  CHECK(std::abs(contour.centroid.first) < 1e-3);
  CHECK(std::abs(contour.centroid.second) < 1e-3);
}

TEST_CASE("contour extraction: censored and at-origin edge cases") {
  const ThresholdContour censored =
      extract_contour(radial_posterior(1.0, 10.0, 0.0), Limits{});
  CHECK(censored.fully_censored);
  CHECK(censored.vertices.empty());
  CHECK(censored.censored_angles.size() == 64);
  CHECK(censored.area_mm2 == 0.0);

  // above target everywhere: a degenerate all-origin contour, not censoring
  const ThresholdContour origin =
      extract_contour(radial_posterior(1.0, -10.0, 0.0), Limits{});
  CHECK_FALSE(origin.fully_censored);
  REQUIRE(origin.vertices.size() == 64);
  CHECK(origin.area_mm2 == 0.0);
  CHECK(origin.centroid.first == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(extract_contour(radial_posterior(1.0, 0.5, 0.0), Limits{}, 0.75, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(extract_contour(radial_posterior(1.0, 0.5, 0.0), Limits{}, 1.5),
                  std::invalid_argument);
}

TEST_CASE("posterior exceptions escape the parallel contour loop intact") {
  const PosteriorFn throwing = [](const Eigen::MatrixX2d&, Eigen::VectorXd&,
                                  Eigen::VectorXd&) {
    throw std::runtime_error("posterior backend unavailable");
  };
  CHECK_THROWS_AS(extract_contour(throwing, Limits{}), std::runtime_error);
}

TEST_CASE("parallel and serial contour extraction agree exactly on a fitted model") {
  const auto trials = circle_rule_trials(8.0, 15.0, 8);
  const auto [model, hp] = fit_response_model(trials, Limits{});
  const PosteriorFn post = model_posterior_fn(model);
  const ThresholdContour a = extract_contour(post, Limits{});
  const ThresholdContour b = extract_contour_serial(post, Limits{});
  REQUIRE(a.vertices.size() == b.vertices.size());
  REQUIRE(a.censored_angles.size() == b.censored_angles.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    CHECK(a.vertices[i].first == b.vertices[i].first);
    CHECK(a.vertices[i].second == b.vertices[i].second);
  }
  CHECK(a.area_mm2 == b.area_mm2);
  CHECK(a.centroid.first == b.centroid.first);
  CHECK(a.centroid.second == b.centroid.second);
  CHECK(a.fully_censored == b.fully_censored);
}

TEST_CASE("fitted contour tracks a hard circular decision rule") {
  const auto trials = circle_rule_trials(8.0, 15.0, 9);
  const auto [model, hp] = fit_response_model(trials, Limits{});
  const ThresholdContour contour = extract_contour(model_posterior_fn(model), Limits{});
  REQUIRE_FALSE(contour.fully_censored);
  for (const auto& [x, z] : contour.vertices) {
    const double r = std::hypot(x, z);
    CHECK(r > 4.0);
    CHECK(r < 13.0);
  }
}

TEST_CASE("projected detection probability is near-monotone along GP rays") {
  // The projection makes mu_hat monotone by construction, but the
  // bisection target Phi(mu_hat / sqrt(1 + sd_hat^2)) can still dip
  // slightly when the variance band widens faster than the mean rises
  // (and the r*i/m grids of nearby radii are not nested). The dips stay
  // far below any usable target resolution; the root finder tolerates
  // them because the crossing neighborhood itself is monotone.
  Rng rng(2026);
  double worst_dip = 0.0;
  for (int ds = 0; ds < 10; ++ds) {
    Eigen::MatrixX2d x(60, 2);
    Eigen::VectorXd y(60);
    const double a_norm = 0.3 + 0.4 * rng.uniform01();
    for (int i = 0; i < 60; ++i) {
      x(i, 0) = -1.0 + 2.0 * rng.uniform01();
      x(i, 1) = -1.0 + 2.0 * rng.uniform01();
      const double p = normal_cdf((std::hypot(x(i, 0), x(i, 1)) - a_norm) / 0.15);
      y(i) = rng.uniform01() < p ? 1.0 : -1.0;
    }
    GpHyperparams hp;
    hp.len_x = 0.1 + 0.6 * rng.uniform01();
    hp.len_z = 0.1 + 0.6 * rng.uniform01();
    hp.signal_var = 1.0 + 8.0 * rng.uniform01();
    GpModel model;
    model.fit(x, y, hp);
    const PosteriorFn post = model_posterior_fn(model);
    for (int q = 0; q < 20; ++q) {
      const double theta = 2.0 * kPi * rng.uniform01();
      const double rm = ray_limit(theta);
      double r1 = rm * rng.uniform01(), r2 = rm * rng.uniform01();
      if (r1 > r2) std::swap(r1, r2);
      const double d1 = detect_prob(monotone_project(post, r1, theta));
      const double d2 = detect_prob(monotone_project(post, r2, theta));
      worst_dip = std::max(worst_dip, d1 - d2);
    }
  }
  CHECK(worst_dip < 0.02);
}

}  // TEST_SUITE("threshold")
