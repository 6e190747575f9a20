#pragma once

#include <vector>

#include <Eigen/Core>

namespace wlr {

struct ScenePoint {
  int id = 0;
  Eigen::Vector3d pos{0.0, 0.0, 0.0};  // mm, world frame
};

// A set of evaluable scene points plus the fixation target and the distance
// of the physical/render display plane.  The fixation must coincide with one
// of the points so per-point errors can be reported at fixation.
struct Scene {
  std::vector<ScenePoint> points;
  Eigen::Vector3d fixation{0.0, 0.0, 0.0};
  double display_distance_mm = 0.0;

  void validate() const;
};

}  // namespace wlr
