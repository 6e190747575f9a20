#pragma once
// Rigid-body eye/head kinematics and the three-stage render-camera error
// model.
//
// World frame: right-handed, origin at the cyclopean eye at zero head
// rotation, +z toward the display, +x rightward, +y up.  Head yaw rotates
// rigidly about the vertical axis through (0, 0, -eye_to_axis_mm); the eyes
// counter-rotate so that both visual axes stay on the fixation point.
//
// Angles are degrees at API boundaries and radians internally; error fields
// are reported in arcminutes (60 arcmin per degree).

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wlr/scene.hpp"

namespace wlr {

using Vec3 = Eigen::Vector3d;

struct DegenerateFixation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegeneratePoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoIntersection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EyeModel {
  double cor_to_cop_mm = 7.8;           // eye rotation center to optical center
  double visual_axis_offset_deg = 0.0;  // horizontal visual-axis tilt, nasal-positive
  double ipd_mm = 63.0;

  void validate() const;
};

struct HeadRig {
  double eye_to_axis_mm = 93.0;  // nominal eye plane to vertical yaw axis
  double yaw_deg = 0.0;

  void validate() const;
};

// True per-eye optics for one head pose.  Eye rotation centers sit at
// (+-ipd/2, 0, -cor_to_cop) so that straight-ahead gaze places the optical
// centers on the z=0 plane at +-ipd/2.
struct RigState {
  Vec3 cop_left, cop_right;    // optical centers (centers of projection)
  Vec3 cor_left, cor_right;    // eye rotation centers
  Vec3 gaze_left, gaze_right;  // unit visual-axis directions
  Vec3 fixation;
  double yaw_deg = 0.0;  // retained so displacement errors can rotate with the head
};

enum class ErrorMode { tracking, fit };

// Render-camera placement error, expressed in the head frame (it rotates
// with the head, so a constant error sweeps a world-frame arc during a head
// rotation).  Positive z is toward the display.
struct DisplacementError {
  double x_err_mm = 0.0;
  double z_err_mm = 0.0;
  ErrorMode mode = ErrorMode::tracking;
};

struct DisplacedCameras {
  Vec3 cam_left, cam_right;
};

struct RenderSetup {
  double plane_distance_mm = 507.0;  // render/display plane along +z

  void validate() const;
};

// Binocular fusion limit as a function of eccentricity: linear from the
// foveal limit out to 6 degrees, compounding beyond that.
struct FusionModel {
  double limit_at_fovea_arcmin = 20.0;
  double limit_at_6deg_arcmin = 60.0;
  double growth_per_deg = 0.07;
};

struct PointErrorRecord {
  int point_id = 0;
  double disparity_err_arcmin = 0.0;
  double visual_dir_err_arcmin = 0.0;
  std::optional<double> depth_err_diopters;  // empty when viewing rays diverge
  double skew_mm = 0.0;                      // closest approach of the viewing rays
  std::optional<Vec3> reconstructed;
  bool divergent = false;
  bool fusible = true;
};

struct BinocularAngles {
  double azimuth_l_deg = 0.0;
  double azimuth_r_deg = 0.0;
  double disparity_deg = 0.0;      // azimuth_l - azimuth_r
  double cyclopean_dir_deg = 0.0;  // mean azimuth
};

struct Triangulation {
  Vec3 point;      // midpoint of the shortest segment between the rays
  double skew_mm;  // length of that segment
};

// Rotation about +y by yaw_deg; maps head-frame forward (+z) toward +x for
// positive yaw.
Eigen::Matrix3d yaw_matrix(double yaw_deg);

// Pose the rig: rotate the eye rotation centers about the head axis, then
// aim each eye at the fixation point (optionally tilted by the visual-axis
// offset, nasal-positive).  Throws DegenerateFixation if the fixation is
// within 1 mm of an eye rotation center.
RigState rig_state(double yaw_deg, const Vec3& fixation, const EyeModel& eye = {},
                   const HeadRig& head = {});
RigState rig_state(const Vec3& fixation, const EyeModel& eye, const HeadRig& head);

// Chord translation of the optical center for a pure eye rotation about its
// rotation center: 2 r sin(theta/2).
double ocular_parallax(double eye_yaw_deg, const EyeModel& eye = {});

DisplacedCameras apply_displacement(const RigState& rig, const DisplacementError& err);

// Intersection of the ray (camera -> point) with the plane z = plane_distance.
// Throws NoIntersection if the ray is parallel to the plane or the
// intersection lies behind the camera.
Eigen::Vector2d project_to_plane(const Vec3& camera, const Vec3& point,
                                 const RenderSetup& setup);

// Midpoint of the shortest segment between two forward ray parameterizations;
// nullopt when the rays are parallel or the closest approach would need a
// negative ray parameter.
std::optional<Triangulation> triangulate(const Vec3& origin_l, const Vec3& dir_l,
                                         const Vec3& origin_r, const Vec3& dir_r);

// Signed horizontal angles of (point - cop) about +y relative to +z.
BinocularAngles binocular_angles(const Vec3& cop_l, const Vec3& cop_r, const Vec3& point);

double panum_limit(double eccentricity_deg, const FusionModel& fusion = {});

// Dioptric comfort band around the display plane, clamped below at 0 D.
std::pair<double, double> zone_of_comfort(double display_diopters);

// Three stages: (1) ground-truth disparity/direction from the true optical
// centers; (2) the point is projected through each displaced camera onto the
// render plane, and viewed rays are cast from the true optical centers
// through those plane points; (3) errors are viewed minus ground truth, with
// apparent depth from skew-ray triangulation and a fusion check of the
// viewed disparity relative to the viewed fixation disparity.
PointErrorRecord point_errors(const Vec3& point, int point_id, const RigState& rig,
                              const DisplacedCameras& cams, const RenderSetup& setup,
                              const FusionModel& fusion = {});

struct SweepSample {
  double yaw_deg = 0.0;
  std::vector<PointErrorRecord> records;
};

struct PointSweepSummary {
  int point_id = 0;
  double p2p_visual_dir_arcmin = 0.0;   // peak-to-peak over the sweep
  double max_abs_disparity_arcmin = 0.0;
};

struct SweepResult {
  std::vector<SweepSample> samples;      // ordered by yaw
  std::vector<PointSweepSummary> summary;  // ordered by point
};

// Sample the error model over a head-rotation range, endpoints included.
// Per-point failures are carried in flagged records; the sweep never aborts.
SweepResult vor_sweep(const Scene& scene, const DisplacementError& err,
                      const RenderSetup& setup, double yaw_min_deg = -20.0,
                      double yaw_max_deg = 20.0, double step_deg = 0.5,
                      const EyeModel& eye = {}, const HeadRig& head = {});
// Plain-loop reference used to validate the parallel version.
SweepResult vor_sweep_serial(const Scene& scene, const DisplacementError& err,
                             const RenderSetup& setup, double yaw_min_deg = -20.0,
                             double yaw_max_deg = 20.0, double step_deg = 0.5,
                             const EyeModel& eye = {}, const HeadRig& head = {});

}  // namespace wlr
