#include "wlr/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wlr {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw SchemaError(where + ": bad numeric field '" + text + "'");
  return value;
}

bool parse_flag(const std::string& text, const std::string& where) {
  if (text == "1") return true;
  if (text == "0") return false;
  throw SchemaError(where + ": expected 0 or 1, got '" + text + "'");
}

// Reads logical lines, tolerating CRLF and skipping a trailing blank line.
std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

void require_header(const std::vector<std::string>& lines, const std::string& header,
                    const std::string& path) {
  if (lines.empty()) throw SchemaError("'" + path + "' is empty");
  if (lines.front() != header)
    throw SchemaError("'" + path + "': expected header '" + header + "', got '" +
                      lines.front() + "'");
  if (lines.size() < 2) throw SchemaError("'" + path + "' has no data rows");
  for (std::size_t i = 1; i < lines.size(); ++i)
    if (lines[i] == header)
      throw SchemaError("'" + path + "': duplicate header at line " +
                        std::to_string(i + 1));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, ptr};
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
  auto out = open_out(path);
  out << "phi_deg,point_id,disparity_err_arcmin,visual_dir_err_arcmin,"
         "depth_err_diopters,skew_mm,fusible\n";
  for (const SweepSample& sample : sweep.samples) {
    for (const PointErrorRecord& rec : sample.records) {
      out << format_double(sample.yaw_deg) << ',' << rec.point_id << ',';
      if (!std::isnan(rec.disparity_err_arcmin))
        out << format_double(rec.disparity_err_arcmin);
      out << ',';
      if (!std::isnan(rec.visual_dir_err_arcmin))
        out << format_double(rec.visual_dir_err_arcmin);
      out << ',';
      if (rec.depth_err_diopters) out << format_double(*rec.depth_err_diopters);
      out << ',';
      if (!std::isnan(rec.skew_mm)) out << format_double(rec.skew_mm);
      out << ',' << (rec.fusible ? '1' : '0') << '\n';
    }
  }
}

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& trials) {
  auto out = open_out(path);
  out << "subject,condition,x_err_mm,z_err_mm,correct\n";
  for (const TrialRecord& t : trials) {
    if (t.subject.find_first_of(",\r\n") != std::string::npos ||
        t.condition.find_first_of(",\r\n") != std::string::npos)
      throw std::invalid_argument("write_trials_csv: identifiers must not contain commas");
    out << t.subject << ',' << t.condition << ',' << format_double(t.x_err_mm) << ','
        << format_double(t.z_err_mm) << ',' << (t.correct ? '1' : '0') << '\n';
  }
}

std::vector<TrialRecord> read_trials_csv(const std::string& path) {
  const auto lines = read_lines(path);
  require_header(lines, "subject,condition,x_err_mm,z_err_mm,correct", path);
  std::vector<TrialRecord> trials;
  trials.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = "'" + path + "' line " + std::to_string(i + 1);
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 5)
      throw SchemaError(where + ": expected 5 fields, got " +
                        std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty())
      throw SchemaError(where + ": empty subject or condition");
    trials.push_back({fields[0], fields[1], parse_double(fields[2], where),
                      parse_double(fields[3], where), parse_flag(fields[4], where)});
  }
  return trials;
}

std::vector<EncoderSample> read_encoder_csv(const std::string& path) {
  const auto lines = read_lines(path);
  require_header(lines, "t_ms,angle_deg", path);
  std::vector<EncoderSample> stream;
  stream.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = "'" + path + "' line " + std::to_string(i + 1);
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 2)
      throw SchemaError(where + ": expected 2 fields, got " +
                        std::to_string(fields.size()));
    stream.push_back({parse_double(fields[0], where), parse_double(fields[1], where)});
  }
  return stream;
}

void write_predictions_csv(const std::string& path,
                           const std::vector<EncoderSample>& stream,
                           const std::vector<std::optional<double>>& predicted) {
  if (stream.size() != predicted.size())
    throw std::invalid_argument("write_predictions_csv: size mismatch");
  auto out = open_out(path);
  out << "t_ms,angle_deg,predicted_angle_deg\n";
  for (std::size_t i = 0; i < stream.size(); ++i) {
    out << format_double(stream[i].t_ms) << ',' << format_double(stream[i].angle_deg)
        << ',';
    if (predicted[i]) out << format_double(*predicted[i]);
    out << '\n';
  }
}

nlohmann::json contour_to_json(const ThresholdContour& contour,
                               const std::string& subject,
                               const std::string& condition) {
  nlohmann::json j;
  j["subject"] = subject;
  j["condition"] = condition;
  j["p_target"] = contour.p_target;
  j["vertices"] = nlohmann::json::array();
  for (const auto& [x, z] : contour.vertices) j["vertices"].push_back({x, z});
  j["censored_angles"] = contour.censored_angles;
  j["area_mm2"] = contour.area_mm2;
  j["centroid"] = {contour.centroid.first, contour.centroid.second};
  j["fully_censored"] = contour.fully_censored;
  return j;
}

ThresholdContour contour_from_json(const nlohmann::json& j) {
  ThresholdContour contour;
  contour.p_target = j.at("p_target").get<double>();
  for (const auto& v : j.at("vertices"))
    contour.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
  contour.censored_angles = j.at("censored_angles").get<std::vector<double>>();
  contour.area_mm2 = j.at("area_mm2").get<double>();
  contour.centroid = {j.at("centroid").at(0).get<double>(),
                      j.at("centroid").at(1).get<double>()};
  contour.fully_censored = j.at("fully_censored").get<bool>();
  return contour;
}

nlohmann::json scene_to_json(const Scene& scene) {
  nlohmann::json j;
  j["display_distance_mm"] = scene.display_distance_mm;
  j["fixation"] = {scene.fixation.x(), scene.fixation.y(), scene.fixation.z()};
  j["points"] = nlohmann::json::array();
  for (const ScenePoint& p : scene.points)
    j["points"].push_back({{"id", p.id}, {"pos", {p.pos.x(), p.pos.y(), p.pos.z()}}});
  return j;
}

Scene scene_from_json(const nlohmann::json& j) {
  Scene scene;
  scene.display_distance_mm = j.at("display_distance_mm").get<double>();
  const auto& fix = j.at("fixation");
  scene.fixation = Vec3(fix.at(0).get<double>(), fix.at(1).get<double>(),
                        fix.at(2).get<double>());
  for (const auto& p : j.at("points")) {
    const auto& pos = p.at("pos");
    scene.points.push_back({p.at("id").get<int>(),
                            Vec3(pos.at(0).get<double>(), pos.at(1).get<double>(),
                                 pos.at(2).get<double>())});
  }
  scene.validate();
  return scene;
}

Scene load_scene_file(const std::string& path) {
  try {
    return scene_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  auto out = open_out(path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json read_json_file(const std::string& path) {
  return nlohmann::json::parse(read_text_file(path));
}

namespace {

// Maps data coordinates into a fixed SVG viewport with y up.
struct SvgFrame {
  double xmin, xmax, ymin, ymax;
  static constexpr double kSize = 480.0;
  static constexpr double kMargin = 48.0;
  double px(double x) const {
    return kMargin + (x - xmin) / (xmax - xmin) * (kSize - 2 * kMargin);
  }
  double py(double y) const {
    return kSize - kMargin - (y - ymin) / (ymax - ymin) * (kSize - 2 * kMargin);
  }
};

void svg_open(std::ostringstream& out) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" "
         "viewBox=\"0 0 480 480\">\n"
      << "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
}

}  // namespace

std::string contour_svg(const ThresholdContour& contour, const Limits& limits,
                        const std::vector<TrialRecord>& trials) {
  const SvgFrame frame{-limits.lx_mm * 1.05, limits.lx_mm * 1.05, -limits.lz_mm * 1.05,
                       limits.lz_mm * 1.05};
  std::ostringstream out;
  svg_open(out);
  out << "<line x1=\"" << frame.px(-limits.lx_mm) << "\" y1=\"" << frame.py(0)
      << "\" x2=\"" << frame.px(limits.lx_mm) << "\" y2=\"" << frame.py(0)
      << "\" stroke=\"#ccc\"/>\n";
  out << "<line x1=\"" << frame.px(0) << "\" y1=\"" << frame.py(-limits.lz_mm)
      << "\" x2=\"" << frame.px(0) << "\" y2=\"" << frame.py(limits.lz_mm)
      << "\" stroke=\"#ccc\"/>\n";
  for (const TrialRecord& t : trials) {
    out << "<circle cx=\"" << frame.px(t.x_err_mm) << "\" cy=\"" << frame.py(t.z_err_mm)
        << "\" r=\"3\" fill=\"" << (t.correct ? "#2a7" : "#d44")
        << "\" fill-opacity=\"0.6\"/>\n";
  }
  if (!contour.vertices.empty()) {
    out << "<polygon points=\"";
    for (const auto& [x, z] : contour.vertices)
      out << frame.px(x) << ',' << frame.py(z) << ' ';
    out << "\" fill=\"none\" stroke=\"" << (contour.fully_censored ? "#d44" : "#333")
        << "\" stroke-width=\"2\""
        << (contour.fully_censored ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
  }
  out << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">"
      << (contour.fully_censored ? "fully censored" : "") << " area="
      << format_double(contour.area_mm2) << " mm^2</text>\n</svg>\n";
  return out.str();
}

std::string sweep_svg(const SweepResult& sweep) {
  std::ostringstream out;
  svg_open(out);
  if (sweep.samples.empty()) {
    out << "</svg>\n";
    return out.str();
  }
  double ymin = 0.0, ymax = 0.0;
  for (const SweepSample& s : sweep.samples) {
    for (const PointErrorRecord& r : s.records) {
      if (!std::isnan(r.disparity_err_arcmin)) {
        ymin = std::min(ymin, r.disparity_err_arcmin);
        ymax = std::max(ymax, r.disparity_err_arcmin);
      }
      if (!std::isnan(r.visual_dir_err_arcmin)) {
        ymin = std::min(ymin, r.visual_dir_err_arcmin);
        ymax = std::max(ymax, r.visual_dir_err_arcmin);
      }
    }
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const SvgFrame frame{sweep.samples.front().yaw_deg, sweep.samples.back().yaw_deg,
                       ymin, ymax};
  const std::size_t n_points = sweep.samples.front().records.size();
  const char* colors[] = {"#36c", "#c63", "#393", "#939", "#a66", "#666"};
  for (std::size_t j = 0; j < n_points; ++j) {
    for (int series = 0; series < 2; ++series) {
      out << "<polyline fill=\"none\" stroke=\"" << colors[j % 6] << "\" stroke-width=\""
          << (series == 0 ? 2 : 1) << "\""
          << (series == 1 ? " stroke-dasharray=\"4 3\"" : "") << " points=\"";
      for (const SweepSample& s : sweep.samples) {
        const PointErrorRecord& r = s.records[j];
        const double v = series == 0 ? r.disparity_err_arcmin : r.visual_dir_err_arcmin;
        if (std::isnan(v)) continue;
        out << frame.px(s.yaw_deg) << ',' << frame.py(v) << ' ';
      }
      out << "\"/>\n";
    }
  }
  out << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">"
         "arcmin vs head yaw (solid: disparity, dashed: visual direction)</text>\n"
      << "</svg>\n";
  return out.str();
}

}  // namespace wlr
