// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "endogeo/calibration_io.hpp"

#include <cmath>

#include "endogeo/error.hpp"
#include "endogeo/raster_io.hpp"

namespace endogeo {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorCode::kParse, std::string("calibration: missing numeric key '") + key + "'");
  }
  return j.at(key).get<double>();
}

int integer(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw Error(ErrorCode::kParse, std::string("calibration: missing integer key '") + key + "'");
  }
  return j.at(key).get<int>();
}

std::vector<double> numbers(const json& j, std::size_t n, const char* what) {
  std::vector<double> out;
  const auto take = [&](const json& v) {
    if (!v.is_number()) {
      throw Error(ErrorCode::kParse, std::string("calibration: non-numeric entry in ") + what);
    }
    out.push_back(v.get<double>());
  };
  if (!j.is_array()) throw Error(ErrorCode::kParse, std::string("calibration: ") + what + " must be an array");
  for (const auto& v : j) {
    if (v.is_array()) {
      for (const auto& w : v) take(w);
    } else {
      take(v);
    }
  }
  if (out.size() != n) {
    throw Error(ErrorCode::kParse, std::string("calibration: ") + what + " needs " +
                                       std::to_string(n) + " numbers");
  }
  return out;
}

CameraModel camera_from_json(const json& j) {
  CameraModel cam;
  cam.intrinsics = intrinsics_from_json(j);
  if (j.contains("dist")) {
    const auto d = numbers(j.at("dist"), 5, "dist");
    cam.distortion = {d[0], d[1], d[2], d[3], d[4]};
  }
  return cam;
}

json camera_to_json(const CameraModel& cam) {
  json j = intrinsics_to_json(cam.intrinsics);
  const auto& d = cam.distortion;
  j["dist"] = {d.k1, d.k2, d.p1, d.p2, d.k3};
  return j;
}

}  // namespace

CameraIntrinsics intrinsics_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "calibration: camera entry must be an object");
  CameraIntrinsics k{number(j, "fx"), number(j, "fy"), number(j, "cx"), number(j, "cy"),
                     integer(j, "width"), integer(j, "height")};
  k.validate();
  return k;
}

json intrinsics_to_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
          {"width", k.width}, {"height", k.height}};
}

StereoCalibration calibration_from_json(const json& j) {
  if (!j.is_object() || !j.contains("left") || !j.contains("right") ||
      !j.contains("extrinsics")) {
    throw Error(ErrorCode::kParse, "calibration: need 'left', 'right' and 'extrinsics'");
  }
  StereoCalibration calib;
  calib.left = camera_from_json(j.at("left"));
  calib.right = camera_from_json(j.at("right"));
  const json& ex = j.at("extrinsics");
  if (!ex.is_object() || !ex.contains("R") || !ex.contains("T")) {
    throw Error(ErrorCode::kParse, "calibration: extrinsics need 'R' and 'T'");
  }
  const auto r = numbers(ex.at("R"), 9, "R");
  const auto t = numbers(ex.at("T"), 3, "T");
  Mat3 rot;
  rot << r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8];
  if (!((rot.transpose() * rot - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-6) ||
      !(rot.determinant() > 0.0)) {
    throw Error(ErrorCode::kCalibration, "calibration: R is not a proper rotation");
  }
  calib.rotation = Quaternion::from_matrix(rot);
  calib.translation = Vec3(t[0], t[1], t[2]);
  calib.validate();
  return calib;
}

json calibration_to_json(const StereoCalibration& calib) {
  const Mat3 r = calib.rotation.matrix();
  json rows = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) rows.push_back(r(i, k));
  }
  return {{"left", camera_to_json(calib.left)},
          {"right", camera_to_json(calib.right)},
          {"extrinsics",
           {{"R", rows},
            {"T", {calib.translation.x(), calib.translation.y(), calib.translation.z()}}}}};
}

StereoCalibration read_calibration_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_binary_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
  try {
    return calibration_from_json(j);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_calibration_file(const std::string& path, const StereoCalibration& calib) {
  write_binary_file(path, calibration_to_json(calib).dump(2) + "\n");
}

}  // namespace endogeo
