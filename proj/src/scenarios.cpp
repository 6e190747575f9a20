#include "wlr/scenarios.hpp"

#include <cmath>
#include <numbers>

namespace wlr {

namespace {

Scene three_posts(double post_z_mm, double display_mm) {
  Scene s;
  s.display_distance_mm = display_mm;
  int id = 0;
  for (double x : {-100.0, 0.0, 100.0})
    s.points.push_back({id++, Eigen::Vector3d(x, 0.0, post_z_mm)});
  s.fixation = Eigen::Vector3d(0.0, 0.0, post_z_mm);
  return s;
}

Scene depth_grid(double display_mm) {
  Scene s;
  s.display_distance_mm = display_mm;
  int id = 0;
  for (int zi = 0; zi < 5; ++zi) {
    const double z = display_mm - 300.0 + zi * 150.0;
    for (int yi = 0; yi < 5; ++yi) {
      const double y = -250.0 + yi * 125.0;
      for (int xi = 0; xi < 5; ++xi) {
        const double x = -250.0 + xi * 125.0;
        s.points.push_back({id++, Eigen::Vector3d(x, y, z)});
      }
    }
  }
  s.fixation = Eigen::Vector3d(0.0, 0.0, display_mm);  // grid center
  return s;
}

Scene slanted_plane(double display_mm, double slant_deg) {
  Scene s;
  s.display_distance_mm = display_mm;
  const double sl = slant_deg * std::numbers::pi / 180.0;
  int id = 0;
  // Top-back: rows above the midline recede (+z) with elevation.
  for (int vi = 0; vi < 11; ++vi) {
    const double v = -150.0 + vi * 30.0;
    for (int ui = 0; ui < 11; ++ui) {
      const double u = -150.0 + ui * 30.0;
      s.points.push_back(
          {id++, Eigen::Vector3d(u, v * std::cos(sl), display_mm + v * std::sin(sl))});
    }
  }
  s.fixation = Eigen::Vector3d(0.0, 0.0, display_mm);
  return s;
}

}  // namespace

std::pair<Scene, RenderSetup> build_scenario(const std::string& preset) {
  Scene scene;
  if (preset == "ar-near") {
    scene = three_posts(383.0, 507.0);
  } else if (preset == "ar-far") {
    // Posts sit 0.64 D in front of the display plane.
    const double display_mm = 1300.0;
    const double post_mm = 1000.0 / (1000.0 / display_mm + 0.64);
    scene = three_posts(post_mm, display_mm);
  } else if (preset == "vr-grid-near") {
    scene = depth_grid(507.0);
  } else if (preset == "vr-grid-far") {
    scene = depth_grid(1300.0);
  } else if (preset == "text-slant") {
    scene = slanted_plane(507.0, 12.8);
  } else {
    throw UnknownPreset("unknown scenario preset: " + preset);
  }
  scene.validate();
  return {scene, RenderSetup{scene.display_distance_mm}};
}

std::pair<MismatchCondition, MismatchCondition> ipd_mismatch_conditions() {
  MismatchCondition fit;
  fit.error = {-12.0, 0.0, ErrorMode::fit};
  MismatchCondition tracking;
  tracking.error = {-12.0, 0.0, ErrorMode::tracking};
  return {fit, tracking};
}

}  // namespace wlr
