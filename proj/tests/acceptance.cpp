// Release gate: each criterion prints one [PASS]/[FAIL] line with the values
// it actually measured; the process exit code is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "wlr/commands.hpp"
#include "wlr/geometry.hpp"
#include "wlr/harness.hpp"
#include "wlr/io.hpp"
#include "wlr/predictor.hpp"
#include "wlr/rng.hpp"
#include "wlr/scenarios.hpp"
#include "wlr/stats.hpp"
#include "wlr/threshold.hpp"

using namespace wlr;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

std::string strf(const char* fmt, ...) {
  char buf[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

void report(int id, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---- 1/2: displacement-error anchors on the near-AR scene ----------------

void fixation_summary(const SweepResult& sweep, int point_id, double* p2p_dir,
                      double* max_disp, double* disp_at_end) {
  for (const auto& s : sweep.summary) {
    if (s.point_id == point_id) {
      *p2p_dir = s.p2p_visual_dir_arcmin;
      *max_disp = s.max_abs_disparity_arcmin;
    }
  }
  for (const auto& rec : sweep.samples.back().records)
    if (rec.point_id == point_id) *disp_at_end = std::abs(rec.disparity_err_arcmin);
}

void criterion_1() {
  const auto t0 = Clock::now();
  const auto [scene, setup] = build_scenario("ar-near");
  const SweepResult sweep =
      vor_sweep(scene, {-1.5, -1.5, ErrorMode::fit}, setup);
  double p2p = 0.0, max_disp = 0.0, disp20 = 0.0;
  fixation_summary(sweep, 1, &p2p, &max_disp, &disp20);
  const double dt = seconds_since(t0);
  const bool ok =
      std::abs(disp20 - 4.0) <= 1.5 && std::abs(p2p - 3.6) <= 1.5 && dt < 1.0;
  report(1, ok,
         strf("camera-fit error (-1.5 mm relief, -1.5 mm separation): fixation "
              "disparity error %.3f arcmin at +20 deg yaw (want 4.0 +- 1.5), "
              "direction change %.3f arcmin peak-to-peak (want 3.6 +- 1.5), %.2f s "
              "(limit 1 s)",
              disp20, p2p, dt));
}

void criterion_2() {
  const auto [scene, setup] = build_scenario("ar-near");
  const SweepResult sweep =
      vor_sweep(scene, {-1.5, -1.5, ErrorMode::tracking}, setup);
  double p2p = 0.0, max_disp = 0.0, disp20 = 0.0;
  fixation_summary(sweep, 1, &p2p, &max_disp, &disp20);
  const bool ok = std::abs(p2p - 3.3) <= 1.5 && max_disp <= 1.4;
  report(2, ok,
         strf("tracking error (-1.5 mm relief, -1.5 mm lateral): fixation "
              "direction change %.3f arcmin peak-to-peak (want 3.3 +- 1.5), "
              "disparity error stays within [0, %.3f] arcmin (limit 1.4)",
              p2p, max_disp));
}

// ---- 3: content on the render plane is immune to camera placement --------

void criterion_3() {
  const auto t0 = Clock::now();
  const RenderSetup setup;
  const Vec3 fixation(0.0, 0.0, setup.plane_distance_mm);

  Rng rng(20260814);
  std::vector<Vec3> points;
  for (int i = 0; i < 100; ++i)
    points.emplace_back((2.0 * rng.uniform01() - 1.0) * 200.0,
                        (2.0 * rng.uniform01() - 1.0) * 150.0,
                        setup.plane_distance_mm);
  struct Case {
    double x, z, yaw;
    ErrorMode mode;
  };
  std::vector<Case> cases(10000);
  for (auto& c : cases) {
    c.x = (2.0 * rng.uniform01() - 1.0) * 20.0;
    c.z = (2.0 * rng.uniform01() - 1.0) * 20.0;
    c.yaw = (2.0 * rng.uniform01() - 1.0) * 20.0;
    c.mode = rng.uniform01() < 0.5 ? ErrorMode::tracking : ErrorMode::fit;
  }

  double worst_arcmin = 0.0, worst_diopters = 0.0;
  bool threw = false;
#pragma omp parallel for schedule(static) \
    reduction(max : worst_arcmin, worst_diopters) reduction(|| : threw)
  for (std::size_t i = 0; i < cases.size(); ++i) {
    try {
      const RigState rig = rig_state(cases[i].yaw, fixation);
      const DisplacedCameras cams =
          apply_displacement(rig, {cases[i].x, cases[i].z, cases[i].mode});
      for (const auto& p : points) {
        const PointErrorRecord rec = point_errors(p, 0, rig, cams, setup);
        worst_arcmin = std::max({worst_arcmin, std::abs(rec.disparity_err_arcmin),
                                 std::abs(rec.visual_dir_err_arcmin)});
        if (rec.depth_err_diopters)
          worst_diopters = std::max(worst_diopters, std::abs(*rec.depth_err_diopters));
      }
    } catch (const std::exception&) {
      threw = true;
    }
  }
  const double dt = seconds_since(t0);
  const bool ok = !threw && worst_arcmin < 1e-6 && dt < 10.0;
  report(3, ok,
         strf("render-plane immunity over 10^4 displacements x 100 plane points: "
              "worst angular error %.3e arcmin (limit 1e-6), worst depth error "
              "%.3e D, %.2f s (limit 10 s)%s",
              worst_arcmin, worst_diopters, dt, threw ? ", exceptions thrown" : ""));
}

// ---- 4: zero displacement is the identity on every preset ----------------

void criterion_4() {
  double worst = 0.0;
  std::string presets;
  for (const char* preset :
       {"ar-near", "ar-far", "vr-grid-near", "vr-grid-far", "text-slant"}) {
    const auto [scene, setup] = build_scenario(preset);
    for (const ErrorMode mode : {ErrorMode::tracking, ErrorMode::fit}) {
      const SweepResult sweep = vor_sweep(scene, {0.0, 0.0, mode}, setup);
      for (const auto& sample : sweep.samples) {
        for (const auto& rec : sample.records) {
          worst = std::max({worst, std::abs(rec.disparity_err_arcmin),
                            std::abs(rec.visual_dir_err_arcmin)});
          if (rec.depth_err_diopters)
            worst = std::max(worst, std::abs(*rec.depth_err_diopters));
        }
      }
    }
    presets += presets.empty() ? preset : std::string(" ") + preset;
  }
  report(4, worst < 1e-9,
         strf("zero-displacement identity on {%s}, both modes: worst error "
              "%.3e (limit 1e-9)",
              presets.c_str(), worst));
}

// ---- 5/6: eye-model scalars ----------------------------------------------

void criterion_5() {
  const double p = ocular_parallax(20.0);
  report(5, p >= 2.6 && p <= 2.9,
         strf("ocular parallax at 20 deg eye rotation = %.4f mm (want [2.6, 2.9])", p));
}

void criterion_6() {
  const double p0 = panum_limit(0.0);
  const double p6 = panum_limit(6.0);
  const double p10 = panum_limit(10.0);
  const bool ok = p0 == 20.0 && p6 == 60.0 && std::abs(p10 - 78.65) <= 0.05;
  report(6, ok,
         strf("fusion limit: %.1f arcmin at 0 deg (want 20), %.1f at 6 deg "
              "(want 60), %.4f at 10 deg (want 78.65 +- 0.05)",
              p0, p6, p10));
}

// ---- 7: forward predictor reproduces polynomial streams ------------------

void criterion_7() {
  const double dt_ms = 2.5;
  double worst_quad = 0.0, worst_exact = 0.0;
  Rng rng(7);
  for (const int w : {11, 51, 101}) {
    for (const double horizon : {0.0, 13.0, 26.0, 52.0}) {
      const Eigen::VectorXd weights = predictor_weights(w, dt_ms, horizon);
      const int n = w + 7;
      std::vector<double> values(n);
      const auto run = [&](double a, double b, double c) {
        for (int i = 0; i < n; ++i) {
          const double t = i * dt_ms;
          values[i] = a + b * t + c * t * t;
        }
        const double t_pred = (n - 1) * dt_ms + horizon;
        const double truth = a + b * t_pred + c * t_pred * t_pred;
        const double pred = predict(values, weights);
        return std::abs(pred - truth) / std::max(1.0, std::abs(truth));
      };
      for (int k = 0; k < 25; ++k) {
        const double a = 10.0 * (2.0 * rng.uniform01() - 1.0);
        const double b = 2.0 * (2.0 * rng.uniform01() - 1.0);
        const double c = 0.05 * (2.0 * rng.uniform01() - 1.0);
        worst_quad = std::max(worst_quad, run(a, b, c));
      }
      worst_exact = std::max(worst_exact, run(42.0, 0.0, 0.0));   // constant
      worst_exact = std::max(worst_exact, run(3.0, -0.25, 0.0));  // ramp
    }
  }
  const bool ok = worst_quad < 1e-9 && worst_exact < 1e-12;
  report(7, ok,
         strf("predictor on degree-<=2 streams (windows 11/51/101, horizons "
              "0..52 ms): worst relative error %.3e (limit 1e-9); constant and "
              "ramp %.3e (limit 1e-12)",
              worst_quad, worst_exact));
}

// ---- 8: monotone projection of the latent posterior -----------------------

void criterion_8() {
  // (a) fixed point on surfaces whose mean and 2-sigma band edges already
  // rise with radius: mu = alpha*(r - r0), sigma = c + d*r with alpha >= 2d.
  double worst_fixed = 0.0;
  const double params[3][4] = {{2.0, 0.4, 0.3, 0.0},
                               {5.0, 0.5, 0.2, 0.5},
                               {1.0, 0.0, 0.05, 0.3}};
  for (const auto& p : params) {
    const double alpha = p[0], r0 = p[1], c = p[2], d = p[3];
    const PosteriorFn analytic = [=](const Eigen::MatrixX2d& q, Eigen::VectorXd& mu,
                                     Eigen::VectorXd& var) {
      mu.resize(q.rows());
      var.resize(q.rows());
      for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const double r = std::hypot(q(i, 0), q(i, 1));
        mu(i) = alpha * (r - r0);
        const double sd = c + d * r;
        var(i) = sd * sd;
      }
    };
    const PosteriorFn reprojected = [&](const Eigen::MatrixX2d& q, Eigen::VectorXd& mu,
                                        Eigen::VectorXd& var) {
      mu.resize(q.rows());
      var.resize(q.rows());
      for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const NormalizedPoint np = to_polar_normalized(q(i, 0), q(i, 1));
        const ProjectedPosterior proj = monotone_project(analytic, np.r, np.theta);
        mu(i) = proj.mu_hat;
        var(i) = proj.sd_hat * proj.sd_hat;
      }
    };
    for (int k = 0; k < 8; ++k) {
      const double theta = 2.0 * std::numbers::pi * k / 8.0;
      for (const double r : {0.05, 0.25, 0.5, 0.75, 1.0, 1.3}) {
        const ProjectedPosterior once = monotone_project(analytic, r, theta);
        const ProjectedPosterior twice = monotone_project(reprojected, r, theta);
        const double sd = c + d * r;
        worst_fixed = std::max(
            {worst_fixed, std::abs(once.mu_hat - alpha * (r - r0)),
             std::abs(once.sd_hat - sd), std::abs(twice.mu_hat - once.mu_hat),
             std::abs(twice.sd_hat - once.sd_hat)});
      }
    }
  }

  // (b, c) fitted posteriors: detection probability along random rays, and
  // mu_hat dominance over the raw mean at the query point.
  Rng rng(2468);
  double worst_dip = 0.0, worst_mu_gap = 0.0;
  int cases = 0;
  for (int ds = 0; ds < 50; ++ds) {
    ObserverSpec spec;
    spec.family = ObserverFamily::elliptical;
    spec.a_mm = 3.0 + 10.0 * rng.uniform01();
    spec.s_mm = 1.0 + 3.0 * rng.uniform01();
    spec.scale_x = 0.7 + 0.7 * rng.uniform01();
    spec.scale_z = 0.7 + 0.7 * rng.uniform01();
    SimulatedObserver observer(spec, 1000 + ds);

    const Limits limits;
    std::vector<TrialRecord> trials;
    for (const auto& [xn, zn] : init_design(25)) {
      const double x = xn * limits.lx_mm, z = zn * limits.lz_mm;
      trials.push_back({"a", "b", x, z, observer.respond(x, z)});
    }
    for (int k = 0; k < 85; ++k) {
      const double x = (2.0 * rng.uniform01() - 1.0) * limits.lx_mm;
      const double z = (2.0 * rng.uniform01() - 1.0) * limits.lz_mm;
      trials.push_back({"a", "b", x, z, observer.respond(x, z)});
    }
    const auto [model, hp] = fit_response_model(trials, limits);
    const PosteriorFn posterior = model_posterior_fn(model);

    for (int k = 0; k < 20; ++k) {
      const double theta = 2.0 * std::numbers::pi * rng.uniform01();
      const double limit = ray_limit(theta);
      double r1 = limit * rng.uniform01();
      double r2 = limit * rng.uniform01();
      if (r1 > r2) std::swap(r1, r2);
      const ProjectedPosterior p1 = monotone_project(posterior, r1, theta);
      const ProjectedPosterior p2 = monotone_project(posterior, r2, theta);
      worst_dip = std::max(worst_dip, detect_prob(p1) - detect_prob(p2));

      const auto [x2, z2] = from_polar_normalized({r2, theta});
      Eigen::MatrixX2d q(1, 2);
      q << x2, z2;
      Eigen::VectorXd mu, var;
      posterior(q, mu, var);
      worst_mu_gap = std::max(worst_mu_gap, mu(0) - p2.mu_hat);
      ++cases;
    }
  }
  // The running max makes mu_hat monotone, but the predictive probability
  // also folds in sd_hat, whose band width may grow with r; small dips are
  // inherent to the projection, so they are bounded rather than forbidden.
  const bool ok = worst_fixed < 1e-12 && worst_mu_gap < 1e-12 && worst_dip < 0.02;
  report(8, ok,
         strf("monotone projection: fixed point on rising surfaces to %.1e; "
              "mu_hat >= raw mu (worst gap %.1e); detection probability over %d "
              "fitted-posterior ray pairs dips at most %.4f (allowed 0.02; "
              "sd_hat growth can shave the predictive probability)",
              worst_fixed, worst_mu_gap, cases, worst_dip));
}

// ---- 9/10: adaptive experiment recovers (or censors) thresholds ----------

void criterion_9() {
  const auto t0 = Clock::now();
  const ObserverSpec spec;  // circular, a=8, s=2, no lapses
  const double r_star = spec.a_mm + spec.s_mm * normal_quantile(0.75);
  const double area_star = std::numbers::pi * r_star * r_star;

  std::vector<double> radii, areas;
  int censored = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ExperimentConfig config;
    config.seed = seed;
    const ExperimentResult result = run_experiment(spec, config);
    if (result.contour.fully_censored) {
      ++censored;
      continue;
    }
    double sum = 0.0;
    for (const auto& [x, z] : result.contour.vertices) sum += std::hypot(x, z);
    radii.push_back(sum / static_cast<double>(result.contour.vertices.size()));
    areas.push_back(result.contour.area_mm2);
  }
  const double med_r = radii.empty() ? 0.0 : median(radii);
  const double med_a = areas.empty() ? 0.0 : median(areas);
  const double dt = seconds_since(t0);
  const bool ok = censored == 0 && std::abs(med_r - r_star) <= 0.20 * r_star &&
                  std::abs(med_a - area_star) <= 0.35 * area_star && dt < 300.0;
  report(9, ok,
         strf("threshold recovery over 20 seeds (circular a=8, s=2, budget 110): "
              "median contour radius %.3f mm (want %.3f +- 20%%), median area "
              "%.1f mm^2 (want %.1f +- 35%%), %d censored, %.1f s (limit 300 s)",
              med_r, r_star, med_a, area_star, censored, dt));
}

void criterion_10() {
  ObserverSpec spec;
  spec.a_mm = 40.0;  // detection stays far below target inside +-15 mm
  spec.s_mm = 5.0;
  ExperimentConfig config;
  config.seed = 1;
  const ExperimentResult result = run_experiment(spec, config);
  const auto& c = result.contour;
  const bool ok = c.fully_censored && c.vertices.empty() && c.area_mm2 == 0.0 &&
                  !c.censored_angles.empty();
  report(10, ok,
         strf("out-of-range observer (a=40 mm): contour reported fully censored "
              "(censored=%s, %zu vertices, area %.1f, %zu censored angles) "
              "instead of fabricating a boundary",
              c.fully_censored ? "yes" : "no", c.vertices.size(), c.area_mm2,
              c.censored_angles.size()));
}

// ---- 11: paired statistics oracle -----------------------------------------

void criterion_11() {
  const std::vector<double> a{1.0, 2.0, 3.0}, b{2.0, 3.0, 5.0};
  const TTestResult res = paired_t_test(a, b);
  const bool ok = std::abs(std::abs(res.t) - 4.0) < 1e-9 && res.df == 2.0 &&
                  std::abs(res.p_two_sided - 0.0572) <= 1e-3;
  report(11, ok,
         strf("paired t-test on (1,2,3) vs (2,3,5): |t| = %.6f (want 4), df = %.0f "
              "(want 2), p = %.6f (want 0.0572 +- 1e-3)",
              std::abs(res.t), res.df, res.p_two_sided));
}

// ---- 12: what this artifact can and cannot reproduce ----------------------

void criterion_12() {
  std::printf(
      "--- human-observer thresholds are out of scope: the reference detection\n"
      "--- thresholds (tracking-condition areas on the order of 31 mm^2 with a\n"
      "--- ~37 mm^2 spread across people, in-headset areas ~7.6 +- 7.0 cm^2)\n"
      "--- were measured on individual human observers and cannot be regenerated\n"
      "--- by software; this artifact instead validates the same pipeline on\n"
      "--- synthetic observers (criteria 9-11) and ingests per-subject trial\n"
      "--- logs of the same shape, demonstrated here end to end.\n");

  const fs::path dir = fs::temp_directory_path() / "wlr_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Per-subject logs for two conditions, from noise-free threshold rules.
  const double rule_a[3] = {7.0, 8.5, 10.0};
  const double rule_b[3] = {9.5, 9.0, 12.0};
  const char* subjects[3] = {"p01", "p02", "p03"};
  std::vector<TrialRecord> cond_a, cond_b;
  for (int s = 0; s < 3; ++s) {
    for (int i = 0; i < 11; ++i) {
      for (int j = 0; j < 11; ++j) {
        const double x = -15.0 + 30.0 * i / 10.0;
        const double z = -15.0 + 30.0 * j / 10.0;
        const double r = std::hypot(x, z);
        cond_a.push_back({subjects[s], "tracking", x, z, r > rule_a[s]});
        cond_b.push_back({subjects[s], "fit", x, z, r > rule_b[s]});
      }
    }
  }
  const std::string trials_a = (dir / "condition_a.csv").string();
  const std::string trials_b = (dir / "condition_b.csv").string();
  write_trials_csv(trials_a, cond_a);
  write_trials_csv(trials_b, cond_b);

  FitArgs fit_a;
  fit_a.trials_path = trials_a;
  fit_a.out = (dir / "contours_a.json").string();
  FitArgs fit_b;
  fit_b.trials_path = trials_b;
  fit_b.out = (dir / "contours_b.json").string();
  ReportArgs rep;
  rep.contours_a = fit_a.out;
  rep.contours_b = fit_b.out;
  rep.out = (dir / "report.json").string();

  bool ok = cmd_fit(fit_a) == 0 && cmd_fit(fit_b) == 0 && cmd_report(rep) == 0;
  double t = 0.0, p = 0.0;
  int n_pairs = 0;
  if (ok) {
    const nlohmann::json report_json = read_json_file(rep.out);
    n_pairs = report_json.at("n_pairs").get<int>();
    ok = n_pairs == 3 && report_json.at("paired_t_test").contains("t");
    if (ok) {
      t = report_json.at("paired_t_test").at("t").get<double>();
      p = report_json.at("paired_t_test").at("p_two_sided").get<double>();
    }
  }
  report(12, ok,
         strf("synthetic per-subject ingestion: 3 subjects x 2 conditions fitted "
              "and compared through the trial-log pipeline (n_pairs=%d, paired "
              "t=%.3f, p=%.3f); human threshold values are documented as "
              "non-reproducible above",
              n_pairs, t, p));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  std::printf("acceptance: %d/12 criteria passed\n", 12 - g_failures);
  return g_failures;
}
