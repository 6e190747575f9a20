#pragma once
// Canonical evaluation scenes and the reference displacement conditions.

#include <string>
#include <utility>

#include "wlr/geometry.hpp"
#include "wlr/scene.hpp"

namespace wlr {

struct UnknownPreset : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Preset names:
//   ar-near      507 mm display, three post-top points at 383 mm, +-100 mm apart
//   ar-far       1300 mm display, posts 0.64 D in front of it
//   vr-grid-near 5x5x5 grid about the 507 mm plane (+-300 mm z, +-250 mm x/y)
//   vr-grid-far  same grid about the 1300 mm plane
//   text-slant   11x11 planar grid through the 507 mm plane center,
//                pitched 12.8 degrees top-back, +-150 mm extent
std::pair<Scene, RenderSetup> build_scenario(const std::string& preset);

// The two canonical demonstration conditions: a 63 -> 51 mm camera-baseline
// reduction (fit) and the same 12 mm magnitude as a shared lateral offset
// (tracking), both viewed at -20 degrees head yaw with a 63 mm IPD.
struct MismatchCondition {
  DisplacementError error;
  double yaw_deg = -20.0;
  EyeModel eye;  // ipd 63
};
std::pair<MismatchCondition, MismatchCondition> ipd_mismatch_conditions();

}  // namespace wlr
