#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wlr/geometry.hpp"
#include "wlr/predictor.hpp"
#include "wlr/scene.hpp"
#include "wlr/threshold.hpp"

namespace wlr {

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal rendering (std::to_chars), so re-reading a CSV
// reproduces the exact doubles that were written.
std::string format_double(double value);

// CSV schemas (UTF-8, LF, fixed headers; CRLF tolerated on input):
//   sweep:       phi_deg,point_id,disparity_err_arcmin,visual_dir_err_arcmin,
//                depth_err_diopters,skew_mm,fusible
//   trials:      subject,condition,x_err_mm,z_err_mm,correct
//   encoder:     t_ms,angle_deg
//   predictions: t_ms,angle_deg,predicted_angle_deg
// Unreconstructable fields (divergent rays, unfilled prediction window) are
// emitted as empty cells. Readers throw SchemaError on malformed content,
// including empty files and files with no data rows.
void write_sweep_csv(const std::string& path, const SweepResult& sweep);

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& trials);
std::vector<TrialRecord> read_trials_csv(const std::string& path);

std::vector<EncoderSample> read_encoder_csv(const std::string& path);
void write_predictions_csv(const std::string& path,
                           const std::vector<EncoderSample>& stream,
                           const std::vector<std::optional<double>>& predicted);

nlohmann::json contour_to_json(const ThresholdContour& contour,
                               const std::string& subject,
                               const std::string& condition);
ThresholdContour contour_from_json(const nlohmann::json& j);

nlohmann::json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);
Scene load_scene_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

// Presentation-only SVG renderings; every plotted quantity also exists in
// the CSV/JSON outputs.
std::string contour_svg(const ThresholdContour& contour, const Limits& limits,
                        const std::vector<TrialRecord>& trials = {});
std::string sweep_svg(const SweepResult& sweep);

}  // namespace wlr
