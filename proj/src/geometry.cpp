#include "wlr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wlr {

namespace {

constexpr double kArcminPerDeg = 60.0;
constexpr double kDegPerRad = 180.0 / std::numbers::pi;

double deg2rad(double d) { return d / kDegPerRad; }

double azimuth_rad(const Vec3& v) { return std::atan2(v.x(), v.z()); }

}  // namespace

void EyeModel::validate() const {
  if (!(cor_to_cop_mm > 0.0))
    throw std::invalid_argument("EyeModel: cor_to_cop_mm must be positive");
  if (!(ipd_mm >= 40.0 && ipd_mm <= 80.0))
    throw std::invalid_argument("EyeModel: ipd_mm outside [40, 80]");
  if (!std::isfinite(visual_axis_offset_deg))
    throw std::invalid_argument("EyeModel: visual_axis_offset_deg not finite");
}

void HeadRig::validate() const {
  if (!(eye_to_axis_mm > 0.0))
    throw std::invalid_argument("HeadRig: eye_to_axis_mm must be positive");
  if (!(std::abs(yaw_deg) <= 90.0))
    throw std::invalid_argument("HeadRig: |yaw_deg| must be <= 90");
}

void RenderSetup::validate() const {
  if (!(plane_distance_mm > 0.0))
    throw std::invalid_argument("RenderSetup: plane_distance_mm must be positive");
}

void Scene::validate() const {
  if (points.empty()) throw std::invalid_argument("Scene: needs at least one point");
  const bool has_fix = std::any_of(points.begin(), points.end(), [&](const ScenePoint& p) {
    return (p.pos - fixation).norm() < 1e-9;
  });
  if (!has_fix)
    throw std::invalid_argument("Scene: fixation must coincide with one of the points");
}

Eigen::Matrix3d yaw_matrix(double yaw_deg) {
  const double th = deg2rad(yaw_deg);
  const double c = std::cos(th), s = std::sin(th);
  Eigen::Matrix3d r;
  r << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return r;
}

RigState rig_state(double yaw_deg, const Vec3& fixation, const EyeModel& eye,
                   const HeadRig& head) {
  eye.validate();
  HeadRig posed = head;
  posed.yaw_deg = yaw_deg;
  posed.validate();

  const double r = eye.cor_to_cop_mm;
  const Vec3 axis_pt(0.0, 0.0, -head.eye_to_axis_mm);
  const Eigen::Matrix3d rot = yaw_matrix(yaw_deg);

  RigState rig;
  rig.yaw_deg = yaw_deg;
  rig.fixation = fixation;
  for (int side = 0; side < 2; ++side) {
    const double sx = side == 0 ? -1.0 : 1.0;
    const Vec3 cor0(sx * eye.ipd_mm / 2.0, 0.0, -r);
    const Vec3 cor = axis_pt + rot * (cor0 - axis_pt);
    const Vec3 to_fix = fixation - cor;
    if (to_fix.norm() < 1.0)
      throw DegenerateFixation("fixation within 1 mm of an eye rotation center");
    // Nasal-positive offset: toward +x for the left eye, toward -x for the right.
    Vec3 gaze = to_fix.normalized();
    if (eye.visual_axis_offset_deg != 0.0)
      gaze = yaw_matrix(sx * -eye.visual_axis_offset_deg) * gaze;
    const Vec3 cop = cor + r * gaze;
    if (side == 0) {
      rig.cor_left = cor;
      rig.gaze_left = gaze;
      rig.cop_left = cop;
    } else {
      rig.cor_right = cor;
      rig.gaze_right = gaze;
      rig.cop_right = cop;
    }
  }
  return rig;
}

RigState rig_state(const Vec3& fixation, const EyeModel& eye, const HeadRig& head) {
  return rig_state(head.yaw_deg, fixation, eye, head);
}

double ocular_parallax(double eye_yaw_deg, const EyeModel& eye) {
  eye.validate();
  if (!(std::abs(eye_yaw_deg) <= 180.0))
    throw std::invalid_argument("ocular_parallax: |angle| must be <= 180");
  return 2.0 * eye.cor_to_cop_mm * std::abs(std::sin(deg2rad(eye_yaw_deg) / 2.0));
}

DisplacedCameras apply_displacement(const RigState& rig, const DisplacementError& err) {
  const Eigen::Matrix3d rot = yaw_matrix(rig.yaw_deg);
  DisplacedCameras cams;
  if (err.mode == ErrorMode::tracking) {
    const Vec3 d = rot * Vec3(err.x_err_mm, 0.0, err.z_err_mm);
    cams.cam_left = rig.cop_left + d;
    cams.cam_right = rig.cop_right + d;
  } else {
    // Baseline change: negative x_err narrows the camera pair symmetrically.
    cams.cam_left = rig.cop_left + rot * Vec3(-err.x_err_mm / 2.0, 0.0, err.z_err_mm);
    cams.cam_right = rig.cop_right + rot * Vec3(err.x_err_mm / 2.0, 0.0, err.z_err_mm);
  }
  return cams;
}

Eigen::Vector2d project_to_plane(const Vec3& camera, const Vec3& point,
                                 const RenderSetup& setup) {
  setup.validate();
  const double dz = point.z() - camera.z();
  if (std::abs(dz) < 1e-12) throw NoIntersection("ray parallel to the render plane");
  const double s = (setup.plane_distance_mm - camera.z()) / dz;
  if (s < 0.0) throw NoIntersection("render plane behind the camera");
  return {camera.x() + s * (point.x() - camera.x()),
          camera.y() + s * (point.y() - camera.y())};
}

std::optional<Triangulation> triangulate(const Vec3& origin_l, const Vec3& dir_l,
                                         const Vec3& origin_r, const Vec3& dir_r) {
  // Closest approach of p(s) = o_l + s d_l and q(t) = o_r + t d_r, s,t >= 0.
  const Vec3 w0 = origin_l - origin_r;
  const double b = dir_l.dot(dir_r);
  const double d = dir_l.dot(w0);
  const double e = dir_r.dot(w0);
  const double denom = 1.0 - b * b;
  if (denom < 1e-14) return std::nullopt;  // parallel
  const double s = (b * e - d) / denom;
  const double t = (e - b * d) / denom;
  if (s < 0.0 || t < 0.0) return std::nullopt;
  const Vec3 p = origin_l + s * dir_l;
  const Vec3 q = origin_r + t * dir_r;
  return Triangulation{0.5 * (p + q), (p - q).norm()};
}

BinocularAngles binocular_angles(const Vec3& cop_l, const Vec3& cop_r, const Vec3& point) {
  if ((point - cop_l).norm() < 1e-9 || (point - cop_r).norm() < 1e-9)
    throw DegeneratePoint("point coincides with an optical center");
  BinocularAngles a;
  a.azimuth_l_deg = azimuth_rad(point - cop_l) * kDegPerRad;
  a.azimuth_r_deg = azimuth_rad(point - cop_r) * kDegPerRad;
  a.disparity_deg = a.azimuth_l_deg - a.azimuth_r_deg;
  a.cyclopean_dir_deg = 0.5 * (a.azimuth_l_deg + a.azimuth_r_deg);
  return a;
}

double panum_limit(double eccentricity_deg, const FusionModel& fusion) {
  if (!(eccentricity_deg >= 0.0))
    throw std::invalid_argument("panum_limit: eccentricity must be >= 0");
  if (eccentricity_deg <= 6.0) {
    return fusion.limit_at_fovea_arcmin +
           (fusion.limit_at_6deg_arcmin - fusion.limit_at_fovea_arcmin) *
               (eccentricity_deg / 6.0);
  }
  return fusion.limit_at_6deg_arcmin *
         std::pow(1.0 + fusion.growth_per_deg, eccentricity_deg - 6.0);
}

std::pair<double, double> zone_of_comfort(double display_diopters) {
  if (!(display_diopters > 0.0))
    throw std::invalid_argument("zone_of_comfort: display_diopters must be positive");
  return {std::max(0.0, display_diopters - 0.6), display_diopters + 0.6};
}

PointErrorRecord point_errors(const Vec3& point, int point_id, const RigState& rig,
                              const DisplacedCameras& cams, const RenderSetup& setup,
                              const FusionModel& fusion) {
  PointErrorRecord rec;
  rec.point_id = point_id;

  const BinocularAngles truth = binocular_angles(rig.cop_left, rig.cop_right, point);

  Vec3 seen_l, seen_r;
  try {
    const Eigen::Vector2d pl = project_to_plane(cams.cam_left, point, setup);
    const Eigen::Vector2d pr = project_to_plane(cams.cam_right, point, setup);
    seen_l = Vec3(pl.x(), pl.y(), setup.plane_distance_mm);
    seen_r = Vec3(pr.x(), pr.y(), setup.plane_distance_mm);
  } catch (const NoIntersection&) {
    rec.divergent = true;
    rec.fusible = false;
    rec.disparity_err_arcmin = std::numeric_limits<double>::quiet_NaN();
    rec.visual_dir_err_arcmin = std::numeric_limits<double>::quiet_NaN();
    rec.skew_mm = std::numeric_limits<double>::quiet_NaN();
    return rec;
  }

  // Each eye views its own plane point, so the viewed azimuths are computed
  // per eye rather than through binocular_angles on a single point.
  const double az_l = azimuth_rad(seen_l - rig.cop_left) * kDegPerRad;
  const double az_r = azimuth_rad(seen_r - rig.cop_right) * kDegPerRad;
  const double viewed_disp = az_l - az_r;
  const double viewed_dir = 0.5 * (az_l + az_r);

  rec.disparity_err_arcmin = (viewed_disp - truth.disparity_deg) * kArcminPerDeg;
  rec.visual_dir_err_arcmin = (viewed_dir - truth.cyclopean_dir_deg) * kArcminPerDeg;

  const Vec3 dir_l = (seen_l - rig.cop_left).normalized();
  const Vec3 dir_r = (seen_r - rig.cop_right).normalized();
  const auto tri = triangulate(rig.cop_left, dir_l, rig.cop_right, dir_r);
  const Vec3 cyclopean = 0.5 * (rig.cop_left + rig.cop_right);
  if (tri) {
    rec.reconstructed = tri->point;
    rec.skew_mm = tri->skew_mm;
    const double true_depth = (point - cyclopean).norm();
    const double seen_depth = (tri->point - cyclopean).norm();
    rec.depth_err_diopters = 1000.0 / seen_depth - 1000.0 / true_depth;
  } else {
    rec.divergent = true;
    rec.skew_mm = std::numeric_limits<double>::quiet_NaN();
  }

  // Fusion: viewed disparity relative to the viewed disparity of the fixation
  // point itself (the vergence reference), against the limit at the point's
  // eccentricity from fixation.
  try {
    const Eigen::Vector2d fl = project_to_plane(cams.cam_left, rig.fixation, setup);
    const Eigen::Vector2d fr = project_to_plane(cams.cam_right, rig.fixation, setup);
    const Vec3 fseen_l(fl.x(), fl.y(), setup.plane_distance_mm);
    const Vec3 fseen_r(fr.x(), fr.y(), setup.plane_distance_mm);
    const double faz_l = azimuth_rad(fseen_l - rig.cop_left) * kDegPerRad;
    const double faz_r = azimuth_rad(fseen_r - rig.cop_right) * kDegPerRad;
    const double fix_disp = faz_l - faz_r;
    const Vec3 to_point = point - cyclopean;
    const Vec3 to_fix = rig.fixation - cyclopean;
    const double cosang = std::clamp(
        to_point.normalized().dot(to_fix.normalized()), -1.0, 1.0);
    const double ecc_deg = std::acos(cosang) * kDegPerRad;
    const double rel_disp_arcmin = (viewed_disp - fix_disp) * kArcminPerDeg;
    rec.fusible = std::abs(rel_disp_arcmin) <= panum_limit(ecc_deg, fusion);
  } catch (const NoIntersection&) {
    rec.fusible = false;
  }
  return rec;
}

namespace {

std::vector<double> yaw_samples(double yaw_min, double yaw_max, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("vor_sweep: step must be positive");
  if (yaw_max < yaw_min) throw std::invalid_argument("vor_sweep: empty yaw range");
  const int n = static_cast<int>(std::floor((yaw_max - yaw_min) / step + 1e-9)) + 1;
  std::vector<double> yaws;
  yaws.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i < n; ++i) yaws.push_back(std::min(yaw_min + i * step, yaw_max));
  if (yaws.back() < yaw_max - step * 1e-9) yaws.push_back(yaw_max);  // endpoint inclusive
  return yaws;
}

SweepSample sweep_one(double yaw, const Scene& scene, const DisplacementError& err,
                      const RenderSetup& setup, const EyeModel& eye, const HeadRig& head) {
  SweepSample sample;
  sample.yaw_deg = yaw;
  const RigState rig = rig_state(yaw, scene.fixation, eye, head);
  const DisplacedCameras cams = apply_displacement(rig, err);
  sample.records.reserve(scene.points.size());
  for (const ScenePoint& p : scene.points)
    sample.records.push_back(point_errors(p.pos, p.id, rig, cams, setup));
  return sample;
}

std::vector<PointSweepSummary> summarize(const Scene& scene,
                                         const std::vector<SweepSample>& samples) {
  std::vector<PointSweepSummary> out;
  out.reserve(scene.points.size());
  for (std::size_t j = 0; j < scene.points.size(); ++j) {
    PointSweepSummary s;
    s.point_id = scene.points[j].id;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    bool any = false;
    for (const SweepSample& sample : samples) {
      const PointErrorRecord& r = sample.records[j];
      if (std::isnan(r.visual_dir_err_arcmin)) continue;  // projection failed
      any = true;
      lo = std::min(lo, r.visual_dir_err_arcmin);
      hi = std::max(hi, r.visual_dir_err_arcmin);
      max_abs = std::max(max_abs, std::abs(r.disparity_err_arcmin));
    }
    s.p2p_visual_dir_arcmin = any ? hi - lo : std::numeric_limits<double>::quiet_NaN();
    s.max_abs_disparity_arcmin = any ? max_abs : std::numeric_limits<double>::quiet_NaN();
    out.push_back(s);
  }
  return out;
}

}  // namespace

SweepResult vor_sweep(const Scene& scene, const DisplacementError& err,
                      const RenderSetup& setup, double yaw_min_deg, double yaw_max_deg,
                      double step_deg, const EyeModel& eye, const HeadRig& head) {
  scene.validate();
  const std::vector<double> yaws = yaw_samples(yaw_min_deg, yaw_max_deg, step_deg);
  SweepResult result;
  result.samples.resize(yaws.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(yaws.size()); ++i)
    result.samples[i] = sweep_one(yaws[i], scene, err, setup, eye, head);
  result.summary = summarize(scene, result.samples);
  return result;
}

SweepResult vor_sweep_serial(const Scene& scene, const DisplacementError& err,
                             const RenderSetup& setup, double yaw_min_deg,
                             double yaw_max_deg, double step_deg, const EyeModel& eye,
                             const HeadRig& head) {
  scene.validate();
  SweepResult result;
  for (double yaw : yaw_samples(yaw_min_deg, yaw_max_deg, step_deg))
    result.samples.push_back(sweep_one(yaw, scene, err, setup, eye, head));
  result.summary = summarize(scene, result.samples);
  return result;
}

}  // namespace wlr
