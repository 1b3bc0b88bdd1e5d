// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic ground truth: static scenes with closed-form (plane, sphere) or
// ray-marched (height-field) geometry, smooth camera paths, exact depth and
// flow, and controllable pose drift. Everything is a pure function of the
// spec and its seed.
//
// World frame: the scene lies around z = distance, cameras sit near the origin
// and look toward +z. Camera axes: x right, y down, z forward.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "endogeo/depth_pipeline.hpp"
#include "endogeo/raster.hpp"
#include "endogeo/trajectory.hpp"

namespace endogeo {

enum class SceneKind { kFrontalPlane, kSpherePatch, kHeightField };

struct SceneSpec {
  SceneKind kind = SceneKind::kFrontalPlane;
  double distance = 100.0;  // mm, nearest surface depth along world +z
  double extent = 200.0;    // mm, half-width of the surface in x and y
  double radius = 80.0;     // mm, sphere patch
  double amplitude = 2.0;   // mm, height-field relief
  std::uint64_t seed = 0;

  void validate() const;
};

/// Surface depth for a world-space ray origin + s * direction, where the
/// direction has unit camera-z so that s is the camera depth. nullopt on miss
/// or when the hit lies behind the origin.
std::optional<double> intersect_scene(const SceneSpec& scene, const Vec3& origin,
                                      const Vec3& direction);

enum class PathKind { kOrbit, kSpline, kLinear };

struct PathSpec {
  PathKind kind = PathKind::kOrbit;
  int n_frames = 200;
  std::uint64_t seed = 0;
  Vec3 center = Vec3::Zero();          // orbit center / linear start / spline offset
  Vec3 target = Vec3(0.0, 0.0, 100.0);  // point the camera looks at (orbit, spline)
  double radius = 20.0;                // mm, orbit radius
  double turns = 1.0;                  // orbit revolutions over the sequence
  Vec3 step = Vec3(1.0, 0.0, 0.0);     // mm per frame, linear path
  double spread = 15.0;                // mm, spline control-point spread
  int controls = 6;                    // spline control points

  void validate() const;
};

/// Camera-to-world pose at `position` whose optical axis points at `target`.
Pose look_at(const Vec3& position, const Vec3& target);

/// Frames 0..n-1. Orbit: circle of `radius` about `center` in the plane
/// z = center.z, random start phase. Linear: center + k * step with identity
/// orientation. Spline: Catmull-Rom through seeded control points.
Trajectory gen_trajectory(const PathSpec& spec);

DepthMap render_depth(const SceneSpec& scene, const Pose& camera_to_world,
                      const CameraIntrinsics& k);

/// Ground-truth flow from view i to view j; pixels without depth or landing
/// behind camera j are masked.
FlowField induced_flow(const SceneSpec& scene, const Pose& pose_i, const Pose& pose_j,
                       const CameraIntrinsics& k);

/// Fraction of view-i pixels that hit the scene and reproject inside view j
/// in front of the camera.
double covisibility(const SceneSpec& scene, const Pose& pose_i, const Pose& pose_j,
                    const CameraIntrinsics& k);

struct DriftSpec {
  double sigma_rot = 0.0;    // rad per frame, per axis
  double sigma_trans = 0.0;  // mm per frame, per axis
  std::uint64_t seed = 0;

  void validate() const;
};

/// Rebuilds the trajectory from its relative poses, each right-multiplied by
/// a random rotation (rotation vector ~ N(0, sigma_rot^2 I)) and translation
/// (~ N(0, sigma_trans^2 I)), starting from the true first pose. Zero sigmas
/// return the input unchanged.
Trajectory inject_drift(const Trajectory& gt, const DriftSpec& spec);

/// Anchor trajectory: gt at frames first, first + stride, ... plus the final
/// frame when it is off-stride.
AnchorSet anchors_from(const Trajectory& gt, FrameIndex stride);

/// One independently drifting local run per anchor gap, each expressed in its
/// own frame (first pose = identity), as a dense local tracker would emit.
std::vector<LocalSegment> simulate_segments(const Trajectory& gt, const AnchorSet& anchors,
                                            const DriftSpec& drift);

struct SimulationSpec {
  SceneSpec scene;
  PathSpec path;
  DriftSpec drift{2e-3, 0.05, 0};
  FrameIndex anchor_stride = 16;
  CameraIntrinsics camera{60.0, 60.0, 31.5, 23.5, 64, 48};
  double stereo_baseline = 4.0;  // mm, for the emitted calibration
  int flow_step = 1;             // flow written for pairs (k, k + flow_step)

  void validate() const;
};

nlohmann::json to_json(const SimulationSpec& spec);
const char* to_string(SceneKind kind);
const char* to_string(PathKind kind);
SceneKind parse_scene_kind(const std::string& name);
PathKind parse_path_kind(const std::string& name);

/// Writes gt.tum, drifted.tum, anchors.tum, segment_%04d.tum,
/// depth_%04d.pfm, flow_%04d_%04d.flo, calib.json and manifest.json into
/// `directory` (created if needed). Returns the manifest.
nlohmann::json write_dataset(const SimulationSpec& spec, const std::string& directory);

}  // namespace endogeo
