// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Stereo preprocessing geometry and metric depth from disparity.
//
// Extrinsics follow the pose convention: `rotation`/`translation` map right
// camera coordinates into the left camera frame, so `translation` is the right
// camera center seen from the left camera. A horizontal rig with the right
// camera b mm to the right has translation (b, 0, 0).

#pragma once

#include "endogeo/geometry.hpp"
#include "endogeo/raster.hpp"

namespace endogeo {

inline constexpr double kDisparityEpsilon = 1e-3;  // px

/// Radial-tangential (Brown-Conrady) coefficients.
struct Distortion {
  double k1 = 0, k2 = 0, p1 = 0, p2 = 0, k3 = 0;

  bool is_zero() const { return k1 == 0 && k2 == 0 && p1 == 0 && p2 == 0 && k3 == 0; }
};

struct CameraModel {
  CameraIntrinsics intrinsics;
  Distortion distortion;
};

struct StereoCalibration {
  CameraModel left;
  CameraModel right;
  Quaternion rotation;
  Vec3 translation = Vec3::Zero();  // mm

  double baseline() const { return translation.norm(); }
  // Throws kCalibration for bad intrinsics, kDegenerateRig for zero baseline.
  void validate() const;
};

// Normalized image coordinates, ideal -> distorted.
Vec2 distort_normalized(const Vec2& xy, const Distortion& d);
/// Inverse of distort_normalized by fixed-point iteration (at most 20 steps,
/// stopping once the reprojection error drops below tolerance_normalized).
Vec2 undistort_normalized(const Vec2& xy_distorted, const Distortion& d,
                          double tolerance_normalized = 1e-12);

// Pixel versions; the pixel tolerance is 1e-8 px.
Vec2 distort_pixel(const Vec2& ideal_pixel, const CameraModel& camera);
Vec2 undistort_pixel(const Vec2& distorted_pixel, const CameraModel& camera);

enum class StereoView { kLeft, kRight };

struct RectificationGeometry {
  // Shared by both rectified views; the left camera's focal lengths, principal
  // point and image size.
  CameraIntrinsics rectified;
  // Rectified-camera to original-camera rotations.
  Mat3 left_rotation = Mat3::Identity();
  Mat3 right_rotation = Mat3::Identity();
  double baseline = 0.0;  // mm, along the rectified x axis
};

/// Bouguet-style rectification: each camera is rotated half of the relative
/// rotation, then both are turned so the x axis runs along the baseline.
RectificationGeometry compute_rectification(const StereoCalibration& calib);

/// Maps an observed (distorted) pixel of one view to rectified coordinates.
Vec2 rectify_point(const Vec2& pixel, StereoView view, const StereoCalibration& calib,
                   const RectificationGeometry& geometry);

/// For every rectified pixel, the source (distorted) pixel to sample from.
struct RectifyMaps {
  CoordinateMap left;
  CoordinateMap right;
  RectificationGeometry geometry;
};

RectifyMaps compute_rectify_maps(const StereoCalibration& calib);

/// Bilinear resampling of `image` at `map` coordinates. Samples outside the
/// image or touching invalid pixels come out invalid (0).
ImageRaster remap(const ImageRaster& image, const CoordinateMap& map);

/// depth = baseline * focal / disparity; disparities <= kDisparityEpsilon,
/// non-finite or masked are invalid. Throws kCalibration unless b, f > 0.
DepthMap disparity_to_depth(const DisparityMap& disparity, double baseline_mm,
                            double focal_px);
DisparityMap depth_to_disparity(const DepthMap& depth, double baseline_mm,
                                double focal_px);

}  // namespace endogeo
