// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "endogeo/sim.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "endogeo/calibration_io.hpp"
#include "endogeo/error.hpp"
#include "endogeo/losses.hpp"
#include "endogeo/raster_io.hpp"
#include "endogeo/rng.hpp"

namespace endogeo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Wave {
  double kx, ky, phase, amplitude;
};

// Smooth seeded relief: four plane waves with 20-60 mm wavelengths whose
// amplitudes sum to the requested relief.
std::array<Wave, 4> height_waves(const SceneSpec& scene) {
  SplitMix64 rng = make_stream(scene.seed, "heightfield");
  std::array<Wave, 4> waves{};
  double total = 0.0;
  for (auto& w : waves) {
    const double wavelength = rng.uniform(20.0, 60.0);
    const double dir = rng.uniform(0.0, kTwoPi);
    w.kx = kTwoPi / wavelength * std::cos(dir);
    w.ky = kTwoPi / wavelength * std::sin(dir);
    w.phase = rng.uniform(0.0, kTwoPi);
    w.amplitude = rng.uniform(0.5, 1.0);
    total += w.amplitude;
  }
  for (auto& w : waves) w.amplitude *= scene.amplitude / total;
  return waves;
}

double height_at(const std::array<Wave, 4>& waves, double x, double y) {
  double h = 0.0;
  for (const auto& w : waves) h += w.amplitude * std::sin(w.kx * x + w.ky * y + w.phase);
  return h;
}

bool within_extent(const SceneSpec& scene, const Vec3& p) {
  return std::abs(p.x()) <= scene.extent && std::abs(p.y()) <= scene.extent;
}

std::optional<double> intersect_height_field(const SceneSpec& scene,
                                             const std::array<Wave, 4>& waves,
                                             const Vec3& o, const Vec3& d) {
  if (!(d.z() > 0.0)) return std::nullopt;
  const double z_lo = scene.distance - scene.amplitude - 1e-6;
  const double z_hi = scene.distance + scene.amplitude + 1e-6;
  const double s_begin = std::max(0.0, (z_lo - o.z()) / d.z());
  const double s_end = (z_hi - o.z()) / d.z();
  if (!(s_end > s_begin)) return std::nullopt;
  const auto f = [&](double s) {
    const Vec3 p = o + s * d;
    return p.z() - (scene.distance + height_at(waves, p.x(), p.y()));
  };
  double prev_s = s_begin;
  double prev_f = f(prev_s);
  if (prev_f >= 0.0) return std::nullopt;  // origin is already behind the surface
  const double ds = 0.05 / d.z();
  for (double s = s_begin + ds;; s += ds) {
    const double cur_s = std::min(s, s_end);
    const double cur_f = f(cur_s);
    if (cur_f >= 0.0) {
      double lo = prev_s, hi = cur_s;
      for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
      }
      const double hit = 0.5 * (lo + hi);
      if (!within_extent(scene, o + hit * d)) return std::nullopt;
      return hit;
    }
    if (cur_s >= s_end) return std::nullopt;
    prev_s = cur_s;
    prev_f = cur_f;
  }
}

SplitMix64 path_rng(const PathSpec& spec) { return make_stream(spec.seed, "path"); }

Vec3 catmull_rom(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3, double t) {
  const double t2 = t * t, t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

}  // namespace

void SceneSpec::validate() const {
  const bool ok = std::isfinite(distance) && distance > 0.0 && extent > 0.0 &&
                  std::isfinite(extent) && radius > 0.0 && std::isfinite(radius) &&
                  amplitude >= 0.0 && amplitude < distance;
  if (!ok) throw Error(ErrorCode::kConfig, "invalid scene spec");
}

std::optional<double> intersect_scene(const SceneSpec& scene, const Vec3& o, const Vec3& d) {
  switch (scene.kind) {
    case SceneKind::kFrontalPlane: {
      if (!(d.z() > 0.0)) return std::nullopt;
      const double s = (scene.distance - o.z()) / d.z();
      if (!(s > 0.0) || !within_extent(scene, o + s * d)) return std::nullopt;
      return s;
    }
    case SceneKind::kSpherePatch: {
      const Vec3 c(0.0, 0.0, scene.distance + scene.radius);
      const Vec3 oc = o - c;
      const double a = d.squaredNorm();
      const double half_b = d.dot(oc);
      const double cc = oc.squaredNorm() - scene.radius * scene.radius;
      const double disc = half_b * half_b - a * cc;
      if (disc < 0.0) return std::nullopt;
      // Near root without cancellation.
      const double q = -half_b + (half_b > 0.0 ? -1.0 : 1.0) * std::sqrt(disc);
      double s0 = q / a, s1 = cc / q;
      if (s0 > s1) std::swap(s0, s1);
      const double s = s0 > 0.0 ? s0 : s1;
      if (!(s > 0.0)) return std::nullopt;
      const Vec3 p = o + s * d;
      if (p.z() > c.z() || !within_extent(scene, p)) return std::nullopt;
      return s;
    }
    case SceneKind::kHeightField:
      return intersect_height_field(scene, height_waves(scene), o, d);
  }
  return std::nullopt;
}

void PathSpec::validate() const {
  if (n_frames < 1) throw Error(ErrorCode::kConfig, "path needs at least one frame");
  if (kind == PathKind::kOrbit && !(radius >= 0.0)) {
    throw Error(ErrorCode::kConfig, "orbit radius must be >= 0");
  }
  if (kind == PathKind::kSpline && (controls < 4 || !(spread >= 0.0))) {
    throw Error(ErrorCode::kConfig, "spline needs >= 4 controls and spread >= 0");
  }
}

Pose look_at(const Vec3& position, const Vec3& target) {
  const Vec3 forward = target - position;
  if (!(forward.norm() > 0.0)) {
    throw Error(ErrorCode::kDomain, "look_at: target coincides with the camera");
  }
  const Vec3 z = forward.normalized();
  Vec3 x = Vec3(0.0, 1.0, 0.0).cross(z);
  if (x.norm() < 1e-9) x = Vec3(1.0, 0.0, 0.0);
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return {Quaternion::from_matrix(r), position};
}

Trajectory gen_trajectory(const PathSpec& spec) {
  spec.validate();
  Trajectory out;
  SplitMix64 rng = path_rng(spec);
  const int n = spec.n_frames;
  switch (spec.kind) {
    case PathKind::kLinear:
      for (int k = 0; k < n; ++k) {
        out.push_back(k, {Quaternion::identity(), spec.center + k * spec.step});
      }
      break;
    case PathKind::kOrbit: {
      const double phase = rng.uniform(0.0, kTwoPi);
      for (int k = 0; k < n; ++k) {
        const double theta = phase + kTwoPi * spec.turns * k / n;
        const Vec3 p = spec.center +
                       Vec3(spec.radius * std::cos(theta), spec.radius * std::sin(theta), 0.0);
        out.push_back(k, look_at(p, spec.target));
      }
      break;
    }
    case PathKind::kSpline: {
      std::vector<Vec3> controls;
      for (int c = 0; c < spec.controls; ++c) {
        const double ex = rng.uniform(-spec.spread, spec.spread);
        const double ey = rng.uniform(-spec.spread, spec.spread);
        const double ez = rng.uniform(-0.25 * spec.spread, 0.25 * spec.spread);
        controls.push_back(spec.center + Vec3(ex, ey, ez));
      }
      // Interior span [1, controls - 2] so every piece has four neighbors.
      const double pieces = spec.controls - 3;
      for (int k = 0; k < n; ++k) {
        const double u = n > 1 ? pieces * k / (n - 1) : 0.0;
        const int seg = std::min(static_cast<int>(u), spec.controls - 4);
        const double t = u - seg;
        const Vec3 p = catmull_rom(controls[seg], controls[seg + 1], controls[seg + 2],
                                   controls[seg + 3], t);
        out.push_back(k, look_at(p, spec.target));
      }
      break;
    }
  }
  return out;
}

DepthMap render_depth(const SceneSpec& scene, const Pose& camera_to_world,
                      const CameraIntrinsics& k) {
  scene.validate();
  k.validate();
  DepthMap depth(k.width, k.height, 0.0, false);
  const std::array<Wave, 4> waves = height_waves(scene);
  const Vec3& o = camera_to_world.translation;
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const Vec3 ray((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      const Vec3 d = camera_to_world.rotation.rotate(ray);
      const std::optional<double> s = scene.kind == SceneKind::kHeightField
                                          ? intersect_height_field(scene, waves, o, d)
                                          : intersect_scene(scene, o, d);
      if (s) depth.set(u, v, *s);
    }
  }
  return depth;
}

FlowField induced_flow(const SceneSpec& scene, const Pose& pose_i, const Pose& pose_j,
                       const CameraIntrinsics& k) {
  const DepthMap depth = render_depth(scene, pose_i, k);
  const Pose g_ij = compose(inverse(pose_j), pose_i);
  const CoordinateMap target = induced_reprojection(depth, k, k, g_ij);
  FlowField flow(k.width, k.height, Vec2::Zero(), false);
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      if (target.valid(x, y)) flow.set(x, y, target.at(x, y) - Vec2(x, y));
    }
  }
  return flow;
}

double covisibility(const SceneSpec& scene, const Pose& pose_i, const Pose& pose_j,
                    const CameraIntrinsics& k) {
  const DepthMap depth = render_depth(scene, pose_i, k);
  const CoordinateMap target =
      induced_reprojection(depth, k, k, compose(inverse(pose_j), pose_i));
  std::size_t seen = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target.mask()[i] && k.contains(target.values()[i])) ++seen;
  }
  return static_cast<double>(seen) / static_cast<double>(target.size());
}

void DriftSpec::validate() const {
  if (!(sigma_rot >= 0.0) || !(sigma_trans >= 0.0) || !std::isfinite(sigma_rot) ||
      !std::isfinite(sigma_trans)) {
    throw Error(ErrorCode::kConfig, "drift sigmas must be finite and >= 0");
  }
}

Trajectory inject_drift(const Trajectory& gt, const DriftSpec& spec) {
  spec.validate();
  if (spec.sigma_rot == 0.0 && spec.sigma_trans == 0.0) return gt;
  if (gt.empty()) return gt;
  SplitMix64 rng = make_stream(spec.seed, "drift");
  Trajectory out;
  out.push_back(gt[0].frame, gt[0].pose);
  for (std::size_t k = 1; k < gt.size(); ++k) {
    const Pose rel = compose(inverse(gt[k - 1].pose), gt[k].pose);
    const Vec3 omega(rng.normal(), rng.normal(), rng.normal());
    const Vec3 tau(rng.normal(), rng.normal(), rng.normal());
    const Pose noise{Quaternion::from_rotation_vector(spec.sigma_rot * omega),
                     spec.sigma_trans * tau};
    out.push_back(gt[k].frame, compose(out.back().pose, compose(rel, noise)));
  }
  return out;
}

AnchorSet anchors_from(const Trajectory& gt, FrameIndex stride) {
  gt.require_non_empty("anchors_from");
  if (stride <= 0) throw Error(ErrorCode::kConfig, "anchor stride must be positive");
  Trajectory anchors;
  const FrameIndex first = gt.front().frame;
  for (const auto& e : gt) {
    if ((e.frame - first) % stride == 0) anchors.push_back(e.frame, e.pose);
  }
  if (anchors.back().frame != gt.back().frame) anchors.push_back(gt.back().frame, gt.back().pose);
  return AnchorSet(std::move(anchors), stride);
}

std::vector<LocalSegment> simulate_segments(const Trajectory& gt, const AnchorSet& anchors,
                                            const DriftSpec& drift) {
  const Trajectory& a = anchors.trajectory();
  std::vector<LocalSegment> out;
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    const Trajectory truth = gt.slice(a[k].frame, a[k + 1].frame);
    DriftSpec local = drift;
    local.seed = make_stream(drift.seed, "segment", k).next();
    const Trajectory drifted = inject_drift(truth, local);
    const Pose origin = inverse(drifted.front().pose);
    Trajectory rebased;
    for (const auto& e : drifted) rebased.push_back(e.frame, compose(origin, e.pose));
    out.push_back({std::move(rebased), a[k].frame, a[k + 1].frame});
  }
  return out;
}

void SimulationSpec::validate() const {
  scene.validate();
  path.validate();
  drift.validate();
  camera.validate();
  if (anchor_stride <= 0) throw Error(ErrorCode::kConfig, "anchor_stride must be positive");
  if (path.n_frames < 2) throw Error(ErrorCode::kConfig, "simulation needs >= 2 frames");
  if (!(stereo_baseline > 0.0)) throw Error(ErrorCode::kConfig, "stereo_baseline must be > 0");
  if (flow_step < 1) throw Error(ErrorCode::kConfig, "flow_step must be >= 1");
}

const char* to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::kFrontalPlane: return "plane";
    case SceneKind::kSpherePatch: return "sphere";
    case SceneKind::kHeightField: return "heightfield";
  }
  return "plane";
}

const char* to_string(PathKind kind) {
  switch (kind) {
    case PathKind::kOrbit: return "orbit";
    case PathKind::kSpline: return "spline";
    case PathKind::kLinear: return "linear";
  }
  return "orbit";
}

SceneKind parse_scene_kind(const std::string& name) {
  if (name == "plane") return SceneKind::kFrontalPlane;
  if (name == "sphere") return SceneKind::kSpherePatch;
  if (name == "heightfield") return SceneKind::kHeightField;
  throw Error(ErrorCode::kConfig, "unknown scene kind '" + name + "' (plane|sphere|heightfield)");
}

PathKind parse_path_kind(const std::string& name) {
  if (name == "orbit") return PathKind::kOrbit;
  if (name == "spline") return PathKind::kSpline;
  if (name == "linear") return PathKind::kLinear;
  throw Error(ErrorCode::kConfig, "unknown path kind '" + name + "' (orbit|spline|linear)");
}

nlohmann::json to_json(const SimulationSpec& s) {
  const auto vec = [](const Vec3& v) { return nlohmann::json{v.x(), v.y(), v.z()}; };
  return {
      {"scene",
       {{"kind", to_string(s.scene.kind)},
        {"distance", s.scene.distance},
        {"extent", s.scene.extent},
        {"radius", s.scene.radius},
        {"amplitude", s.scene.amplitude},
        {"seed", s.scene.seed}}},
      {"path",
       {{"kind", to_string(s.path.kind)},
        {"n_frames", s.path.n_frames},
        {"seed", s.path.seed},
        {"center", vec(s.path.center)},
        {"target", vec(s.path.target)},
        {"radius", s.path.radius},
        {"turns", s.path.turns},
        {"step", vec(s.path.step)},
        {"spread", s.path.spread},
        {"controls", s.path.controls}}},
      {"drift",
       {{"sigma_rot", s.drift.sigma_rot},
        {"sigma_trans", s.drift.sigma_trans},
        {"seed", s.drift.seed}}},
      {"anchor_stride", s.anchor_stride},
      {"camera", intrinsics_to_json(s.camera)},
      {"stereo_baseline", s.stereo_baseline},
      {"flow_step", s.flow_step},
  };
}

nlohmann::json write_dataset(const SimulationSpec& spec, const std::string& directory) {
  spec.validate();
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  const fs::path dir(directory);
  std::vector<std::string> files;
  const auto emit = [&](const std::string& name) {
    files.push_back(name);
    return (dir / name).string();
  };
  char name[64];

  const Trajectory gt = gen_trajectory(spec.path);
  const AnchorSet anchors = anchors_from(gt, spec.anchor_stride);
  write_tum_file(emit("gt.tum"), gt);
  write_tum_file(emit("drifted.tum"), inject_drift(gt, spec.drift));
  write_tum_file(emit("anchors.tum"), anchors.trajectory());
  const auto segments = simulate_segments(gt, anchors, spec.drift);
  for (std::size_t k = 0; k < segments.size(); ++k) {
    std::snprintf(name, sizeof(name), "segment_%04zu.tum", k);
    write_tum_file(emit(name), segments[k].trajectory);
  }

  for (const auto& e : gt) {
    std::snprintf(name, sizeof(name), "depth_%04lld.pfm", static_cast<long long>(e.frame));
    write_scalar_pfm(emit(name), render_depth(spec.scene, e.pose, spec.camera));
  }
  for (std::size_t i = 0; i + spec.flow_step < gt.size(); ++i) {
    const auto& a = gt[i];
    const auto& b = gt[i + spec.flow_step];
    std::snprintf(name, sizeof(name), "flow_%04lld_%04lld.flo", static_cast<long long>(a.frame),
                  static_cast<long long>(b.frame));
    write_flo(emit(name), induced_flow(spec.scene, a.pose, b.pose, spec.camera));
  }

  StereoCalibration calib;
  calib.left.intrinsics = spec.camera;
  calib.right.intrinsics = spec.camera;
  calib.translation = Vec3(spec.stereo_baseline, 0.0, 0.0);
  write_calibration_file(emit("calib.json"), calib);

  files.push_back("manifest.json");
  std::sort(files.begin(), files.end());
  nlohmann::json manifest = {{"files", files}, {"spec", to_json(spec)}};
  write_binary_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace endogeo
