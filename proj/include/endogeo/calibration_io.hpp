// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Stereo calibration JSON:
//   {
//     "left":  {"fx":..,"fy":..,"cx":..,"cy":..,"width":..,"height":..,
//               "dist":[k1,k2,p1,p2,k3]},
//     "right": {...},
//     "extrinsics": {"R":[9 numbers, row-major], "T":[tx,ty,tz]}
//   }
// R and T map right-camera coordinates into the left camera frame (mm).
// "R" may also be given as three rows of three.

#pragma once

#include <string>

#include <json.hpp>

#include "endogeo/depth_pipeline.hpp"

namespace endogeo {

StereoCalibration calibration_from_json(const nlohmann::json& j);
nlohmann::json calibration_to_json(const StereoCalibration& calib);

nlohmann::json intrinsics_to_json(const CameraIntrinsics& k);
CameraIntrinsics intrinsics_from_json(const nlohmann::json& j);

StereoCalibration read_calibration_file(const std::string& path);
void write_calibration_file(const std::string& path, const StereoCalibration& calib);

}  // namespace endogeo
