#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "wlr/commands.hpp"

namespace {

// Shared --limits LX,LZ option (mm).
void add_limits_option(CLI::App* cmd, wlr::Limits& limits) {
  cmd->add_option_function<std::string>(
         "--limits",
         [&limits](const std::string& text) {
           const auto comma = text.find(',');
           if (comma == std::string::npos)
             throw CLI::ValidationError("--limits expects LX,LZ");
           try {
             std::size_t used = 0;
             limits.lx_mm = std::stod(text.substr(0, comma), &used);
             if (used != comma) throw std::invalid_argument("trailing");
             const std::string rest = text.substr(comma + 1);
             limits.lz_mm = std::stod(rest, &used);
             if (used != rest.size()) throw std::invalid_argument("trailing");
           } catch (const std::exception&) {
             throw CLI::ValidationError("--limits expects two numbers LX,LZ");
           }
           limits.validate();
         },
         "Axis limits LX,LZ in mm (default 15,15)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Stereo render-camera displacement errors and perceptual threshold "
      "contours"};
  app.require_subcommand(1);

  wlr::SimulateArgs sim;
  std::uint64_t unused_seed = 0;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Sweep head yaw and write per-point binocular errors");
  simulate->add_option("--scenario", sim.scenario,
                       "Preset: ar-near, ar-far, vr-grid-near, vr-grid-far, "
                       "text-slant (default ar-near)");
  simulate->add_option("--scene-file", sim.scene_file,
                       "Scene JSON (overrides --scenario)")
      ->check(CLI::ExistingFile);
  simulate->add_option("--mode", sim.mode, "Displacement mode: fit | tracking");
  simulate->add_option("--x-err", sim.x_err_mm, "Lateral displacement in mm");
  simulate->add_option("--z-err", sim.z_err_mm, "Longitudinal displacement in mm");
  simulate->add_option("--yaw-min", sim.yaw_min_deg, "Sweep start in degrees");
  simulate->add_option("--yaw-max", sim.yaw_max_deg, "Sweep end in degrees");
  simulate->add_option("--step", sim.step_deg, "Sweep step in degrees");
  simulate->add_option("--out", sim.out, "Output sweep CSV path")->required();
  simulate->add_option("--svg", sim.svg, "Optional SVG plot path");
  simulate->add_option("--seed", unused_seed, "Unused (simulate is deterministic)");

  wlr::FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand(
      "fit", "Fit threshold contours from a 2IFC trial log");
  fit_cmd->add_option("--trials", fit.trials_path, "Trials CSV")
      ->required()
      ->check(CLI::ExistingFile);
  add_limits_option(fit_cmd, fit.limits);
  fit_cmd->add_option("--p-target", fit.p_target, "Target detection probability");
  fit_cmd->add_option("--out", fit.out, "Output contour JSON path")->required();
  fit_cmd->add_option("--svg-dir", fit.svg_dir,
                      "Directory for per-(subject, condition) SVG plots");
  fit_cmd->add_option("--seed", unused_seed, "Unused (fitting is deterministic)");

  wlr::ExperimentArgs exp;
  CLI::App* experiment = app.add_subcommand(
      "experiment", "Run a simulated adaptive threshold experiment");
  experiment->add_option("--observer", exp.observer,
                         "Observer spec, e.g. circular:a=8,s=2,lapse=0");
  add_limits_option(experiment, exp.limits);
  experiment->add_option("--n-init", exp.n_init, "Initialization trials (25-32)");
  experiment->add_option("--budget", exp.budget, "Total trial budget");
  experiment->add_option("--p-target", exp.p_target, "Target detection probability");
  experiment->add_option("--seed", exp.seed, "RNG seed");
  experiment->add_option("--subject", exp.subject, "Subject label for the outputs");
  experiment->add_option("--condition", exp.condition, "Condition label");
  experiment
      ->add_option("--out", exp.out,
                   "Output prefix (writes <out>.trials.csv, <out>.contour.json)")
      ->required();

  wlr::ReportArgs rep;
  CLI::App* report = app.add_subcommand(
      "report", "Compare two conditions' contours (areas, centroids, paired t)");
  report->add_option("--a", rep.contours_a, "Condition A contour JSON")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--b", rep.contours_b, "Condition B contour JSON")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--out", rep.out, "Output report JSON path")->required();
  report->add_option("--seed", unused_seed, "Unused (reporting is deterministic)");

  wlr::PredictArgs pred;
  CLI::App* predict = app.add_subcommand(
      "predict", "Forward-predict an encoder angle stream");
  predict->add_option("--encoder", pred.encoder_path, "Encoder CSV (t_ms,angle_deg)")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--window", pred.window_samples, "Window length (odd, >= 5)");
  predict->add_option("--horizon-ms", pred.horizon_ms, "Prediction horizon in ms");
  predict->add_option("--out", pred.out, "Output predictions CSV path")->required();
  predict->add_option("--seed", unused_seed, "Unused (prediction is deterministic)");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return wlr::cmd_simulate(sim);
  if (fit_cmd->parsed()) return wlr::cmd_fit(fit);
  if (experiment->parsed()) return wlr::cmd_experiment(exp);
  if (report->parsed()) return wlr::cmd_report(rep);
  if (predict->parsed()) return wlr::cmd_predict(pred);
  return 1;
}
