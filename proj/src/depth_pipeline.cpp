// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "endogeo/depth_pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "endogeo/error.hpp"

namespace endogeo {

void StereoCalibration::validate() const {
  left.intrinsics.validate();
  right.intrinsics.validate();
  if (!translation.allFinite()) {
    throw Error(ErrorCode::kCalibration, "non-finite stereo translation");
  }
  if (!(baseline() > 0.0)) {
    throw Error(ErrorCode::kDegenerateRig, "stereo rig has zero baseline");
  }
}

Vec2 distort_normalized(const Vec2& xy, const Distortion& d) {
  const double x = xy.x(), y = xy.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + r2 * (d.k1 + r2 * (d.k2 + r2 * d.k3));
  const double dx = 2.0 * d.p1 * x * y + d.p2 * (r2 + 2.0 * x * x);
  const double dy = d.p1 * (r2 + 2.0 * y * y) + 2.0 * d.p2 * x * y;
  return {x * radial + dx, y * radial + dy};
}

Vec2 undistort_normalized(const Vec2& xy_distorted, const Distortion& d,
                          double tolerance_normalized) {
  if (d.is_zero()) return xy_distorted;
  Vec2 xy = xy_distorted;
  for (int iter = 0; iter < 20; ++iter) {
    const double x = xy.x(), y = xy.y();
    const double r2 = x * x + y * y;
    const double radial = 1.0 + r2 * (d.k1 + r2 * (d.k2 + r2 * d.k3));
    const double dx = 2.0 * d.p1 * x * y + d.p2 * (r2 + 2.0 * x * x);
    const double dy = d.p1 * (r2 + 2.0 * y * y) + 2.0 * d.p2 * x * y;
    xy = {(xy_distorted.x() - dx) / radial, (xy_distorted.y() - dy) / radial};
    if ((distort_normalized(xy, d) - xy_distorted).norm() < tolerance_normalized) {
      break;
    }
  }
  return xy;
}

Vec2 distort_pixel(const Vec2& ideal_pixel, const CameraModel& camera) {
  const auto& k = camera.intrinsics;
  const Vec2 n((ideal_pixel.x() - k.cx) / k.fx, (ideal_pixel.y() - k.cy) / k.fy);
  const Vec2 dn = distort_normalized(n, camera.distortion);
  return {k.fx * dn.x() + k.cx, k.fy * dn.y() + k.cy};
}

Vec2 undistort_pixel(const Vec2& distorted_pixel, const CameraModel& camera) {
  const auto& k = camera.intrinsics;
  const Vec2 dn((distorted_pixel.x() - k.cx) / k.fx, (distorted_pixel.y() - k.cy) / k.fy);
  const Vec2 n = undistort_normalized(dn, camera.distortion, 1e-8 / std::max(k.fx, k.fy));
  return {k.fx * n.x() + k.cx, k.fy * n.y() + k.cy};
}

RectificationGeometry compute_rectification(const StereoCalibration& calib) {
  calib.validate();
  const Mat3 half = slerp(Quaternion::identity(), calib.rotation, 0.5).matrix();
  const Vec3 t = half.transpose() * calib.translation;
  const double planar = std::hypot(t.x(), t.y());
  if (planar <= 1e-12 * t.norm()) {
    throw Error(ErrorCode::kDegenerateRig,
                "baseline is parallel to the optical axis; rows cannot be aligned");
  }
  const Vec3 e1 = t / t.norm();
  const Vec3 e2 = Vec3(-t.y(), t.x(), 0.0) / planar;
  const Vec3 e3 = e1.cross(e2);
  Mat3 align;
  align.col(0) = e1;
  align.col(1) = e2;
  align.col(2) = e3;

  RectificationGeometry g;
  g.rectified = calib.left.intrinsics;
  g.left_rotation = half * align;
  g.right_rotation = calib.rotation.matrix().transpose() * g.left_rotation;
  g.baseline = (g.left_rotation.transpose() * calib.translation).x();
  return g;
}

Vec2 rectify_point(const Vec2& pixel, StereoView view, const StereoCalibration& calib,
                   const RectificationGeometry& geometry) {
  const CameraModel& cam = view == StereoView::kLeft ? calib.left : calib.right;
  const Mat3& rot = view == StereoView::kLeft ? geometry.left_rotation
                                              : geometry.right_rotation;
  const auto& k = cam.intrinsics;
  const Vec2 dn((pixel.x() - k.cx) / k.fx, (pixel.y() - k.cy) / k.fy);
  const Vec2 n = undistort_normalized(dn, cam.distortion, 1e-8 / std::max(k.fx, k.fy));
  const Vec3 ray = rot.transpose() * Vec3(n.x(), n.y(), 1.0);
  return project(ray, geometry.rectified);
}

namespace {

CoordinateMap build_map(const CameraModel& cam, const Mat3& rect_to_cam,
                        const CameraIntrinsics& rect) {
  CoordinateMap map(rect.width, rect.height);
  const auto& k = cam.intrinsics;
  for (int v = 0; v < rect.height; ++v) {
    for (int u = 0; u < rect.width; ++u) {
      const Vec3 ray((u - rect.cx) / rect.fx, (v - rect.cy) / rect.fy, 1.0);
      const Vec3 c = rect_to_cam * ray;
      if (!(c.z() > 0.0)) {
        // Behind the source camera: point outside any image.
        map.set(u, v, Vec2(-1.0, -1.0));
        continue;
      }
      const Vec2 dn = distort_normalized(Vec2(c.x() / c.z(), c.y() / c.z()), cam.distortion);
      map.set(u, v, Vec2(k.fx * dn.x() + k.cx, k.fy * dn.y() + k.cy));
    }
  }
  return map;
}

}  // namespace

RectifyMaps compute_rectify_maps(const StereoCalibration& calib) {
  RectifyMaps maps;
  maps.geometry = compute_rectification(calib);
  maps.left = build_map(calib.left, maps.geometry.left_rotation, maps.geometry.rectified);
  maps.right = build_map(calib.right, maps.geometry.right_rotation, maps.geometry.rectified);
  return maps;
}

ImageRaster remap(const ImageRaster& image, const CoordinateMap& map) {
  require_same_shape(image, map, "remap");
  ImageRaster out(map.width(), map.height(), 0.0, false);
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.valid(x, y)) continue;
      const Vec2& src = map.at(x, y);
      if (const auto v = sample_bilinear(image, src.x(), src.y())) out.set(x, y, *v);
    }
  }
  return out;
}

namespace {

void check_stereo_scalars(double baseline_mm, double focal_px) {
  if (!(baseline_mm > 0.0) || !(focal_px > 0.0) || !std::isfinite(baseline_mm) ||
      !std::isfinite(focal_px)) {
    throw Error(ErrorCode::kCalibration, "baseline and focal length must be positive");
  }
}

}  // namespace

DepthMap disparity_to_depth(const DisparityMap& disparity, double baseline_mm,
                            double focal_px) {
  check_stereo_scalars(baseline_mm, focal_px);
  DepthMap depth(disparity.width(), disparity.height(), 0.0, false);
  for (int y = 0; y < disparity.height(); ++y) {
    for (int x = 0; x < disparity.width(); ++x) {
      const double d = disparity.at(x, y);
      if (!disparity.valid(x, y) || !std::isfinite(d) || d <= kDisparityEpsilon) continue;
      depth.set(x, y, baseline_mm * focal_px / d);
    }
  }
  return depth;
}

DisparityMap depth_to_disparity(const DepthMap& depth, double baseline_mm,
                                double focal_px) {
  check_stereo_scalars(baseline_mm, focal_px);
  DisparityMap disparity(depth.width(), depth.height(), 0.0, false);
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const double z = depth.at(x, y);
      if (!depth.valid(x, y) || !std::isfinite(z) || z <= 0.0) continue;
      disparity.set(x, y, baseline_mm * focal_px / z);
    }
  }
  return disparity;
}

}  // namespace endogeo
