#pragma once

#include <cstdint>
#include <string>

#include "wlr/threshold.hpp"

namespace wlr {

// Each command returns a process exit code (0 on success) and reports
// failures on stderr; they are thin orchestration over the library modules
// so tests can drive them without spawning processes.

struct SimulateArgs {
  std::string scenario = "ar-near";
  std::string scene_file;  // overrides scenario when set
  std::string mode = "fit";
  double x_err_mm = 0.0;
  double z_err_mm = 0.0;
  double yaw_min_deg = -20.0;
  double yaw_max_deg = 20.0;
  double step_deg = 0.5;
  std::string out;          // sweep CSV; summary JSON lands at <out>.summary.json
  std::string svg;          // optional plot
};
int cmd_simulate(const SimulateArgs& args);

struct FitArgs {
  std::string trials_path;
  Limits limits;
  double p_target = 0.75;
  std::string out;      // JSON array, one contour per (subject, condition)
  std::string svg_dir;  // optional; one SVG per (subject, condition)
};
int cmd_fit(const FitArgs& args);

struct ExperimentArgs {
  std::string observer = "circular:a=8,s=2,lapse=0";
  Limits limits;
  int n_init = 25;
  int budget = 110;
  double p_target = 0.75;
  std::uint64_t seed = 0;
  std::string subject = "sim";
  std::string condition = "synthetic";
  std::string out;  // prefix: writes <out>.trials.csv and <out>.contour.json
};
int cmd_experiment(const ExperimentArgs& args);

struct ReportArgs {
  std::string contours_a;  // cmd_fit/cmd_experiment contour JSON
  std::string contours_b;
  std::string out;
};
int cmd_report(const ReportArgs& args);

struct PredictArgs {
  std::string encoder_path;
  int window_samples = 51;
  double horizon_ms = 26.0;
  std::string out;
};
int cmd_predict(const PredictArgs& args);

}  // namespace wlr
