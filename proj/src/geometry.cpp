// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "endogeo/geometry.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "endogeo/error.hpp"

namespace endogeo {

Quaternion::Quaternion(double w, double x, double y, double z)
    : w_(w), x_(x), y_(y), z_(z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!std::isfinite(n) || n == 0.0) {
    throw Error(ErrorCode::kNumeric, "quaternion with zero or non-finite norm");
  }
  if (std::abs(n - 1.0) > 1e-14) {
    w_ /= n;
    x_ /= n;
    y_ /= n;
    z_ /= n;
  }
}

Quaternion Quaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) return identity();
  const double s = std::sin(0.5 * angle) / n;
  return {std::cos(0.5 * angle), s * axis.x(), s * axis.y(), s * axis.z()};
}

Quaternion Quaternion::from_rotation_vector(const Vec3& omega) {
  const double theta = omega.norm();
  if (theta < 1e-12) {
    // First-order expansion; renormalized by the constructor.
    return {1.0, 0.5 * omega.x(), 0.5 * omega.y(), 0.5 * omega.z()};
  }
  return from_axis_angle(omega, theta);
}

Quaternion Quaternion::from_matrix(const Mat3& r) {
  const double trace = r.trace();
  if (trace > 0.0) {
    const double s = 0.5 / std::sqrt(trace + 1.0);
    return {0.25 / s, (r(2, 1) - r(1, 2)) * s, (r(0, 2) - r(2, 0)) * s,
            (r(1, 0) - r(0, 1)) * s};
  }
  if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    return {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s,
            (r(0, 2) + r(2, 0)) / s};
  }
  if (r(1, 1) > r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    return {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s,
            (r(1, 2) + r(2, 1)) / s};
  }
  const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
  return {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s,
          (r(1, 2) + r(2, 1)) / s, 0.25 * s};
}

Quaternion Quaternion::conjugate() const {
  Quaternion q;
  q.w_ = w_;
  q.x_ = -x_;
  q.y_ = -y_;
  q.z_ = -z_;
  return q;
}

Quaternion Quaternion::operator-() const {
  Quaternion q;
  q.w_ = -w_;
  q.x_ = -x_;
  q.y_ = -y_;
  q.z_ = -z_;
  return q;
}

Quaternion Quaternion::operator*(const Quaternion& b) const {
  return {w_ * b.w_ - x_ * b.x_ - y_ * b.y_ - z_ * b.z_,
          w_ * b.x_ + x_ * b.w_ + y_ * b.z_ - z_ * b.y_,
          w_ * b.y_ - x_ * b.z_ + y_ * b.w_ + z_ * b.x_,
          w_ * b.z_ + x_ * b.y_ - y_ * b.x_ + z_ * b.w_};
}

double Quaternion::dot(const Quaternion& b) const {
  return w_ * b.w_ + x_ * b.x_ + y_ * b.y_ + z_ * b.z_;
}

Quaternion Quaternion::canonical() const { return w_ < 0.0 ? -*this : *this; }

Mat3 Quaternion::matrix() const {
  const double xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  Mat3 r;
  r << 1 - 2 * (yy + zz), 2 * (xy - wz), 2 * (xz + wy),  //
      2 * (xy + wz), 1 - 2 * (xx + zz), 2 * (yz - wx),    //
      2 * (xz - wy), 2 * (yz + wx), 1 - 2 * (xx + yy);
  return r;
}

Vec3 Quaternion::rotate(const Vec3& v) const {
  const Vec3 u(x_, y_, z_);
  const Vec3 c = 2.0 * u.cross(v);
  return v + w_ * c + u.cross(c);
}

double Quaternion::angle() const {
  const double s = std::sqrt(x_ * x_ + y_ * y_ + z_ * z_);
  return 2.0 * std::atan2(s, std::abs(w_));
}

double angular_distance(const Quaternion& a, const Quaternion& b) {
  return (a.conjugate() * b).angle();
}

Quaternion slerp(const Quaternion& q0, const Quaternion& q1, double t) {
  if (t == 0.0) return q0;
  if (t == 1.0) return q1;
  Eigen::Vector4d a = q0.coeffs();
  Eigen::Vector4d b = q1.coeffs();
  double d = a.dot(b);
  if (d < 0.0) {
    b = -b;
    d = -d;
  }
  Eigen::Vector4d r;
  if (d > 1.0 - 1e-10) {
    r = (1.0 - t) * a + t * b;
  } else {
    // Angle between the 4-vectors, stable for small and large separations.
    const double phi = 2.0 * std::atan2((b - a).norm(), (b + a).norm());
    const double s = std::sin(phi);
    r = (std::sin((1.0 - t) * phi) / s) * a + (std::sin(t * phi) / s) * b;
  }
  return {r[0], r[1], r[2], r[3]};
}

Pose compose(const Pose& a, const Pose& b) {
  return {a.rotation * b.rotation, a.rotation.rotate(b.translation) + a.translation};
}

Pose inverse(const Pose& p) {
  const Quaternion inv = p.rotation.conjugate();
  return {inv, -inv.rotate(p.translation)};
}

Pose pose_interp(const Pose& error, double t) {
  if (t == 0.0) return Pose::identity();
  if (t == 1.0) return error;
  return {slerp(Quaternion::identity(), error.rotation, t), t * error.translation};
}

void CameraIntrinsics::validate() const {
  const bool ok = std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) &&
                  std::isfinite(cy) && fx > 0 && fy > 0 && width > 0 &&
                  height > 0 && cx >= 0 && cx < width && cy >= 0 && cy < height;
  if (!ok) {
    throw Error(ErrorCode::kCalibration,
                "invalid intrinsics: need fx, fy > 0 and principal point "
                "inside a positive image size");
  }
}

bool CameraIntrinsics::contains(const Vec2& p) const {
  return p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= width - 1 &&
         p.y() <= height - 1;
}

Vec2 project(const Vec3& point, const CameraIntrinsics& k) {
  if (!(point.z() > 0.0)) {
    throw Error(ErrorCode::kInvalidPoint, "projection of a point with z <= 0");
  }
  return {k.fx * point.x() / point.z() + k.cx, k.fy * point.y() / point.z() + k.cy};
}

Vec3 unproject(const Vec2& pixel, double depth, const CameraIntrinsics& k) {
  if (!(depth > 0.0)) {
    throw Error(ErrorCode::kInvalidPoint, "unprojection with depth <= 0");
  }
  return {(pixel.x() - k.cx) / k.fx * depth, (pixel.y() - k.cy) / k.fy * depth,
          depth};
}

SimilarityTransform SimilarityTransform::inverse() const {
  SimilarityTransform inv;
  inv.scale = 1.0 / scale;
  inv.rotation = rotation.conjugate();
  inv.translation = -(inv.scale * inv.rotation.rotate(translation));
  return inv;
}

SimilarityTransform umeyama_align(std::span<const Vec3> source,
                                  std::span<const Vec3> target,
                                  bool with_scale) {
  if (source.size() != target.size()) {
    throw Error(ErrorCode::kAlignment, "alignment point sets differ in length");
  }
  const std::size_t n = source.size();
  if (n < 3) {
    throw Error(ErrorCode::kAlignment, "alignment needs at least 3 point pairs");
  }

  Vec3 mu_s = Vec3::Zero(), mu_t = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_s += source[i];
    mu_t += target[i];
  }
  mu_s /= static_cast<double>(n);
  mu_t /= static_cast<double>(n);

  Mat3 sigma = Mat3::Zero();
  double var_s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 ds = source[i] - mu_s;
    sigma += (target[i] - mu_t) * ds.transpose();
    var_s += ds.squaredNorm();
  }
  sigma /= static_cast<double>(n);
  var_s /= static_cast<double>(n);

  Eigen::JacobiSVD<Mat3> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 d = svd.singularValues();
  if (!(d[0] > 0.0) || d[1] <= 1e-10 * d[0]) {
    throw Error(ErrorCode::kAlignment,
                "degenerate alignment: point configuration has rank < 2");
  }

  Mat3 s = Mat3::Identity();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    s(2, 2) = -1.0;
  }
  const Mat3 r = svd.matrixU() * s * svd.matrixV().transpose();

  SimilarityTransform out;
  out.rotation = Quaternion::from_matrix(r);
  out.scale = with_scale ? (d.asDiagonal() * s).trace() / var_s : 1.0;
  out.translation = mu_t - out.scale * (r * mu_s);
  return out;
}

}  // namespace endogeo
