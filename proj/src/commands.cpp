#include "wlr/commands.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iostream>
#include <map>
#include <vector>

#include "wlr/harness.hpp"
#include "wlr/io.hpp"
#include "wlr/scenarios.hpp"
#include "wlr/stats.hpp"

namespace wlr {

namespace {

int fail(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 1;
}

std::string sanitize_filename(const std::string& name) {
  std::string safe = name;
  for (char& c : safe)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  return safe;
}

const PointSweepSummary& fixation_summary(const Scene& scene, const SweepResult& sweep) {
  const auto fix = std::find_if(scene.points.begin(), scene.points.end(),
                                [&](const ScenePoint& p) {
                                  return (p.pos - scene.fixation).norm() < 1e-9;
                                });
  const auto s = std::find_if(sweep.summary.begin(), sweep.summary.end(),
                              [&](const PointSweepSummary& ps) {
                                return ps.point_id == fix->id;
                              });
  return *s;
}

}  // namespace

int cmd_simulate(const SimulateArgs& args) {
  try {
    if (args.out.empty()) return fail("simulate: --out is required");
    Scene scene;
    RenderSetup setup;
    if (!args.scene_file.empty()) {
      scene = load_scene_file(args.scene_file);
      setup.plane_distance_mm = scene.display_distance_mm;
    } else {
      std::tie(scene, setup) = build_scenario(args.scenario);
    }
    DisplacementError err;
    err.x_err_mm = args.x_err_mm;
    err.z_err_mm = args.z_err_mm;
    if (args.mode == "tracking") {
      err.mode = ErrorMode::tracking;
    } else if (args.mode == "fit") {
      err.mode = ErrorMode::fit;
    } else {
      return fail("simulate: --mode must be 'tracking' or 'fit'");
    }

    const SweepResult sweep =
        vor_sweep(scene, err, setup, args.yaw_min_deg, args.yaw_max_deg, args.step_deg);
    write_sweep_csv(args.out, sweep);

    const PointSweepSummary& fix = fixation_summary(scene, sweep);
    nlohmann::json summary;
    summary["scenario"] = args.scene_file.empty() ? args.scenario : args.scene_file;
    summary["mode"] = args.mode;
    summary["x_err_mm"] = args.x_err_mm;
    summary["z_err_mm"] = args.z_err_mm;
    summary["yaw_min_deg"] = args.yaw_min_deg;
    summary["yaw_max_deg"] = args.yaw_max_deg;
    summary["step_deg"] = args.step_deg;
    summary["yaw_samples"] = sweep.samples.size();
    summary["fixation_point_id"] = fix.point_id;
    summary["fixation_p2p_visual_dir_arcmin"] = fix.p2p_visual_dir_arcmin;
    summary["fixation_max_abs_disparity_err_arcmin"] = fix.max_abs_disparity_arcmin;
    summary["points"] = nlohmann::json::array();
    for (const PointSweepSummary& ps : sweep.summary)
      summary["points"].push_back({{"point_id", ps.point_id},
                                   {"p2p_visual_dir_arcmin", ps.p2p_visual_dir_arcmin},
                                   {"max_abs_disparity_err_arcmin",
                                    ps.max_abs_disparity_arcmin}});
    write_text_file(args.out + ".summary.json", summary.dump(2) + "\n");
    if (!args.svg.empty()) write_text_file(args.svg, sweep_svg(sweep));

    std::cout << "sweep: " << sweep.samples.size() << " yaw samples x "
              << scene.points.size() << " points -> " << args.out << "\n"
              << "fixation point " << fix.point_id
              << ": peak-to-peak visual direction " << fix.p2p_visual_dir_arcmin
              << " arcmin, max |disparity error| " << fix.max_abs_disparity_arcmin
              << " arcmin\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_fit(const FitArgs& args) {
  try {
    if (args.out.empty()) return fail("fit: --out is required");
    const std::vector<TrialRecord> trials = read_trials_csv(args.trials_path);

    // Group by (subject, condition) in first-appearance order.
    std::vector<std::pair<std::string, std::string>> keys;
    std::map<std::pair<std::string, std::string>, std::vector<TrialRecord>> groups;
    for (const TrialRecord& t : trials) {
      const auto key = std::make_pair(t.subject, t.condition);
      if (!groups.count(key)) keys.push_back(key);
      groups[key].push_back(t);
    }

    if (!args.svg_dir.empty()) std::filesystem::create_directories(args.svg_dir);

    nlohmann::json out_json = nlohmann::json::array();
    for (const auto& key : keys) {
      const auto& group = groups[key];
      auto [model, hp] = fit_response_model(group, args.limits);
      const ThresholdContour contour = extract_contour(
          model_posterior_fn(model), args.limits, args.p_target);
      out_json.push_back(contour_to_json(contour, key.first, key.second));
      std::cout << key.first << "/" << key.second << ": " << group.size()
                << " trials, area " << contour.area_mm2 << " mm^2, "
                << contour.censored_angles.size() << " censored angles"
                << (contour.fully_censored ? " (fully censored)" : "") << "\n";
      if (!args.svg_dir.empty()) {
        const std::string path = args.svg_dir + "/" + sanitize_filename(key.first) +
                                 "_" + sanitize_filename(key.second) + ".svg";
        write_text_file(path, contour_svg(contour, args.limits, group));
      }
    }
    write_text_file(args.out, out_json.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_experiment(const ExperimentArgs& args) {
  try {
    if (args.out.empty()) return fail("experiment: --out is required");
    const ObserverSpec spec = ObserverSpec::parse(args.observer);
    ExperimentConfig config;
    config.limits = args.limits;
    config.n_init = args.n_init;
    config.budget = args.budget;
    config.p_target = args.p_target;
    config.seed = args.seed;

    const ExperimentResult result =
        run_experiment(spec, config, args.subject, args.condition);
    write_trials_csv(args.out + ".trials.csv", result.log.as_trial_records());
    write_text_file(args.out + ".contour.json",
                    contour_to_json(result.contour, args.subject, args.condition)
                            .dump(2) +
                        "\n");
    std::cout << "observer " << spec.to_string() << ", seed " << args.seed << ": "
              << result.log.trials.size() << " trials -> " << args.out
              << ".trials.csv\ncontour area " << result.contour.area_mm2 << " mm^2, "
              << result.contour.censored_angles.size() << " censored angles"
              << (result.contour.fully_censored ? " (fully censored)" : "") << "\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

namespace {

struct ConditionSet {
  std::vector<std::string> subjects;  // include order
  std::map<std::string, ThresholdContour> contours;
  std::vector<std::string> condition_labels;
};

ConditionSet load_condition(const std::string& path) {
  nlohmann::json j = read_json_file(path);
  if (j.is_object()) j = nlohmann::json::array({j});
  if (!j.is_array() || j.empty())
    throw SchemaError("'" + path + "': expected a contour object or non-empty array");
  ConditionSet set;
  for (const auto& entry : j) {
    const std::string subject = entry.at("subject").get<std::string>();
    if (set.contours.count(subject))
      throw SchemaError("'" + path + "': duplicate subject '" + subject + "'");
    set.subjects.push_back(subject);
    set.contours[subject] = contour_from_json(entry);
    const std::string label = entry.at("condition").get<std::string>();
    if (std::find(set.condition_labels.begin(), set.condition_labels.end(), label) ==
        set.condition_labels.end())
      set.condition_labels.push_back(label);
  }
  return set;
}

nlohmann::json condition_block(const std::string& path, const ConditionSet& set,
                               const std::vector<std::string>& included) {
  nlohmann::json block;
  block["source"] = path;
  block["conditions"] = set.condition_labels;
  block["subjects"] = nlohmann::json::array();
  std::vector<double> areas;
  for (const std::string& subject : set.subjects) {
    const ThresholdContour& c = set.contours.at(subject);
    block["subjects"].push_back({{"subject", subject},
                                 {"area_mm2", c.area_mm2},
                                 {"centroid", {c.centroid.first, c.centroid.second}},
                                 {"fully_censored", c.fully_censored}});
    if (std::find(included.begin(), included.end(), subject) != included.end())
      areas.push_back(c.area_mm2);
  }
  if (!areas.empty()) block["mean_area_mm2"] = mean(areas);
  if (areas.size() >= 2) block["sd_area_mm2"] = sample_sd(areas);
  block["n_included"] = areas.size();
  return block;
}

}  // namespace

int cmd_report(const ReportArgs& args) {
  try {
    if (args.out.empty()) return fail("report: --out is required");
    const ConditionSet a = load_condition(args.contours_a);
    const ConditionSet b = load_condition(args.contours_b);

    std::vector<std::string> sorted_a = a.subjects, sorted_b = b.subjects;
    std::sort(sorted_a.begin(), sorted_a.end());
    std::sort(sorted_b.begin(), sorted_b.end());
    if (sorted_a != sorted_b)
      return fail("report: subject sets differ between conditions (SubjectMismatch)");

    // Fully censored thresholds have no meaningful area; drop those subjects
    // from the paired comparison but keep them listed.
    std::vector<std::string> included, excluded;
    for (const std::string& subject : a.subjects) {
      if (a.contours.at(subject).fully_censored || b.contours.at(subject).fully_censored)
        excluded.push_back(subject);
      else
        included.push_back(subject);
    }

    nlohmann::json report;
    report["condition_a"] = condition_block(args.contours_a, a, included);
    report["condition_b"] = condition_block(args.contours_b, b, included);
    report["excluded_subjects"] = excluded;
    report["n_pairs"] = included.size();

    if (included.size() < 2) {
      report["paired_t_test"] = {{"insufficient_pairs", true}};
      std::cout << "report: only " << included.size()
                << " comparable subject pair(s); no t-test\n";
    } else {
      std::vector<double> areas_a, areas_b;
      for (const std::string& subject : included) {
        areas_a.push_back(a.contours.at(subject).area_mm2);
        areas_b.push_back(b.contours.at(subject).area_mm2);
      }
      try {
        const TTestResult t = paired_t_test(areas_a, areas_b);
        report["paired_t_test"] = {
            {"t", t.t}, {"df", t.df}, {"p_two_sided", t.p_two_sided}};
        std::cout << "paired t-test over " << included.size() << " subjects: t = "
                  << t.t << ", df = " << t.df << ", p = " << t.p_two_sided << "\n";
      } catch (const DegenerateVariance&) {
        report["paired_t_test"] = {{"degenerate_variance", true}};
        std::cout << "paired t-test: degenerate (zero variance of differences)\n";
      }
    }
    write_text_file(args.out, report.dump(2) + "\n");
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_predict(const PredictArgs& args) {
  try {
    if (args.out.empty()) return fail("predict: --out is required");
    const std::vector<EncoderSample> stream = read_encoder_csv(args.encoder_path);
    PredictorConfig config;
    config.window_samples = args.window_samples;
    config.horizon_ms = args.horizon_ms;
    config.validate();

    std::vector<std::optional<double>> predicted(stream.size());
    if (stream.size() >= 2) {
      const double dt = uniform_interval_ms(stream);
      const Eigen::VectorXd weights =
          predictor_weights(config.window_samples, dt, config.horizon_ms);
      std::vector<double> angles(stream.size());
      for (std::size_t i = 0; i < stream.size(); ++i) angles[i] = stream[i].angle_deg;
      const auto w = static_cast<std::size_t>(config.window_samples);
      for (std::size_t i = w - 1; i < stream.size(); ++i) {
        predicted[i] =
            predict(std::span<const double>(angles.data(), i + 1), weights);
      }
    }
    write_predictions_csv(args.out, stream, predicted);
    std::size_t filled = 0;
    for (const auto& p : predicted)
      if (p) ++filled;
    std::cout << "predict: " << stream.size() << " samples, " << filled
              << " predictions -> " << args.out << "\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

}  // namespace wlr
