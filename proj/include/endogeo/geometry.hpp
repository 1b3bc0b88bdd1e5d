// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Rigid-body primitives: unit quaternions, SE(3) poses, pinhole projection and
// least-squares point-set alignment. Units are millimeters and radians.

#pragma once

#include <span>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace endogeo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Unit quaternion, Hamilton convention, stored scalar-first (w, x, y, z).
///
/// Every constructor renormalizes unless the input is already unit length to
/// within 1e-14, so values read back from a 17-digit text dump are kept
/// bit-for-bit.
class Quaternion {
 public:
  Quaternion() = default;
  Quaternion(double w, double x, double y, double z);

  static Quaternion identity() { return {}; }
  static Quaternion from_axis_angle(const Vec3& axis, double angle);
  // Rotation vector (axis * angle), exponential map of so(3).
  static Quaternion from_rotation_vector(const Vec3& omega);
  static Quaternion from_matrix(const Mat3& rotation);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  Eigen::Vector4d coeffs() const { return {w_, x_, y_, z_}; }

  Quaternion conjugate() const;
  Quaternion operator-() const;
  Quaternion operator*(const Quaternion& rhs) const;
  double dot(const Quaternion& rhs) const;

  // Sign representative with w >= 0.
  Quaternion canonical() const;
  Mat3 matrix() const;
  Vec3 rotate(const Vec3& v) const;
  // Rotation angle in [0, pi].
  double angle() const;

 private:
  double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

// Rotation angle of a^-1 * b, in [0, pi].
double angular_distance(const Quaternion& a, const Quaternion& b);

/// Spherical linear interpolation along the shorter arc. Falls back to
/// normalized linear interpolation when the inputs are within 1e-10 of
/// parallel. t = 0 and t = 1 return the endpoints exactly.
Quaternion slerp(const Quaternion& q0, const Quaternion& q1, double t);

/// Rigid transform x -> R x + t; translation in millimeters. A camera pose maps
/// camera coordinates to world coordinates.
struct Pose {
  Quaternion rotation;
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }

  Vec3 apply(const Vec3& x) const { return rotation.rotate(x) + translation; }
};

// compose(a, b) maps x to a(b(x)).
Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& p);

/// Fraction t of a full error transform: rotation slerped from identity,
/// translation scaled linearly.
Pose pose_interp(const Pose& error, double t);

struct CameraIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  // Throws kCalibration unless fx, fy > 0 and the principal point lies inside
  // the image.
  void validate() const;
  bool contains(const Vec2& pixel) const;
};

Vec2 project(const Vec3& point, const CameraIntrinsics& k);
Vec3 unproject(const Vec2& pixel, double depth, const CameraIntrinsics& k);

/// x -> s R x + t.
struct SimilarityTransform {
  double scale = 1.0;
  Quaternion rotation;
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const {
    return scale * rotation.rotate(x) + translation;
  }
  SimilarityTransform inverse() const;
};

/// Least-squares similarity (or rigid, with_scale = false) transform T
/// minimizing sum ||T(source_i) - target_i||^2, with a proper rotation.
/// Throws kAlignment for fewer than 3 pairs, unequal lengths, or a
/// configuration whose covariance has rank below 2.
SimilarityTransform umeyama_align(std::span<const Vec3> source,
                                  std::span<const Vec3> target,
                                  bool with_scale = true);

}  // namespace endogeo
