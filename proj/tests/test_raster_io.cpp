// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cstring>

#include "endogeo/calibration_io.hpp"
#include "endogeo/error.hpp"
#include "endogeo/raster_io.hpp"
#include "test_support.hpp"

namespace endogeo {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kNumeric;
}

PfmImage random_pfm(SplitMix64& rng, int w, int h, int channels) {
  PfmImage img{w, h, channels, {}};
  for (int i = 0; i < w * h * channels; ++i) {
    img.data.push_back(static_cast<float>(rng.uniform(-1e3, 1e3)));
  }
  return img;
}

std::uint32_t bits(float f) { return std::bit_cast<std::uint32_t>(f); }

TEST(Pfm, HeaderLayout) {
  const PfmImage img{2, 1, 1, {1.0f, 2.0f}};
  const std::string bytes = encode_pfm(img);
  EXPECT_EQ(bytes.substr(0, 12), "Pf\n2 1\n-1.0\n");
  EXPECT_EQ(bytes.size(), 12u + 8u);
  const std::string big = encode_pfm(PfmImage{1, 1, 3, {1, 2, 3}}, false);
  EXPECT_EQ(big.substr(0, 10), "PF\n1 1\n1.0");
}

TEST(Pfm, RowsStoredBottomToTop) {
  const PfmImage img{1, 2, 1, {10.0f, 20.0f}};  // top row 10, bottom row 20
  const std::string bytes = encode_pfm(img);
  float first = 0;
  std::memcpy(&first, bytes.data() + 12, 4);
  EXPECT_EQ(first, 20.0f);
}

TEST(Pfm, RoundTripBitExactBothEndiannesses) {
  SplitMix64 rng(51);
  for (int channels : {1, 3}) {
    for (bool little : {true, false}) {
      PfmImage img = random_pfm(rng, 7, 5, channels);
      img.data[3] = -0.0f;
      img.data[4] = std::numeric_limits<float>::denorm_min();
      const PfmImage back = decode_pfm(encode_pfm(img, little));
      ASSERT_EQ(back.width, 7);
      ASSERT_EQ(back.height, 5);
      ASSERT_EQ(back.channels, channels);
      ASSERT_EQ(back.data.size(), img.data.size());
      for (std::size_t i = 0; i < img.data.size(); ++i) {
        EXPECT_EQ(bits(back.data[i]), bits(img.data[i]));
      }
    }
  }
}

TEST(Pfm, EndiannessFollowsHeader) {
  const PfmImage img{1, 1, 1, {1.5f}};
  const std::string little = encode_pfm(img, true);
  const std::string big = encode_pfm(img, false);
  // Same payload bytes reversed between the two encodings.
  const std::string lp = little.substr(little.size() - 4);
  std::string bp = big.substr(big.size() - 4);
  std::reverse(bp.begin(), bp.end());
  EXPECT_EQ(lp, bp);
  EXPECT_EQ(decode_pfm(big).data[0], 1.5f);
  // A foreign writer's scale magnitude is accepted.
  std::string scaled = "Pf\n1 1\n-4.0\n" + lp;
  EXPECT_EQ(decode_pfm(scaled).data[0], 1.5f);
}

TEST(Pfm, MalformedInputs) {
  EXPECT_EQ(code_of([] { decode_pfm("P6\n1 1\n255\n"); }), ErrorCode::kFormat);
  EXPECT_EQ(code_of([] { decode_pfm("Pf\n2 2\n-1.0\nabc"); }), ErrorCode::kFormat);
  EXPECT_EQ(code_of([] { decode_pfm("Pf\nx 2\n-1.0\n"); }), ErrorCode::kFormat);
  EXPECT_EQ(code_of([] { read_pfm("/nonexistent/x.pfm"); }), ErrorCode::kIo);
}

TEST(Pfm, ScalarRasterInvalidsAsZero) {
  DepthMap d(3, 2, 5.0);
  d.invalidate(1, 1);
  const PfmImage img = to_pfm(d.retag<void>());
  EXPECT_EQ(img.data[4], 0.0f);
  const ScalarRaster back = scalar_from_pfm(img, true);
  EXPECT_FALSE(back.valid(1, 1));
  EXPECT_EQ(back.valid_count(), 5u);
}

TEST(Pfm, PointmapRoundTrip) {
  SplitMix64 rng(52);
  Pointmap p(4, 3);
  for (auto& v : p.values()) v = testing::random_vec3(rng, 1, 10).cast<float>().cast<double>();
  p.invalidate(2, 1);
  const Pointmap back = pointmap_from_pfm(decode_pfm(encode_pfm(to_pfm(p))));
  EXPECT_FALSE(back.valid(2, 1));
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 4; ++x) {
      if (p.valid(x, y)) {
        EXPECT_TRUE(back.at(x, y) == p.at(x, y)) << x << "," << y;
      }
    }
  }
}

TEST(Flo, RoundTripBitExact) {
  SplitMix64 rng(53);
  FlowField f(9, 4);
  for (auto& v : f.values()) {
    v = Vec2(static_cast<float>(rng.uniform(-50, 50)), static_cast<float>(rng.uniform(-50, 50)));
  }
  f.invalidate(3, 2);
  const std::string bytes = encode_flo(f);
  EXPECT_EQ(bytes.size(), 12u + 9u * 4u * 8u);
  float magic = 0;
  std::memcpy(&magic, bytes.data(), 4);
  EXPECT_EQ(magic, 202021.25f);
  const FlowField back = decode_flo(bytes);
  ASSERT_EQ(back.width(), 9);
  ASSERT_EQ(back.height(), 4);
  EXPECT_FALSE(back.valid(3, 2));
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 9; ++x) {
      if (f.valid(x, y)) {
        EXPECT_TRUE(back.at(x, y) == f.at(x, y)) << x << "," << y << " " << std::hexfloat << back.at(x, y).transpose() << " vs " << f.at(x, y).transpose();
      }
    }
  }
  EXPECT_EQ(encode_flo(back), bytes);
}

TEST(Flo, MalformedInputs) {
  EXPECT_EQ(code_of([] { decode_flo("abcd"); }), ErrorCode::kFormat);
  std::string bad(12, '\0');
  EXPECT_EQ(code_of([&] { decode_flo(bad); }), ErrorCode::kFormat);
  std::string truncated = encode_flo(FlowField(2, 2, Vec2(1, 1)));
  truncated.pop_back();
  EXPECT_EQ(code_of([&] { decode_flo(truncated); }), ErrorCode::kFormat);
}

TEST(Files, WriteReadThroughDisk) {
  const std::string dir = testing::scratch_dir("raster_io");
  DepthMap d(5, 4, 42.5);
  d.invalidate(0, 0);
  write_scalar_pfm(dir + "/d.pfm", d);
  const DepthMap back = read_depth_pfm(dir + "/d.pfm");
  EXPECT_EQ(back.values(), std::vector<double>(d.values().begin(), d.values().end()));
  EXPECT_FALSE(back.valid(0, 0));
}

TEST(Calibration, JsonRoundTrip) {
  StereoCalibration c;
  c.left.intrinsics = {500, 501, 320, 240, 640, 480};
  c.left.distortion = {-0.1, 0.01, 1e-4, -2e-4, 0.001};
  c.right.intrinsics = {502, 503, 321, 241, 640, 480};
  c.rotation = Quaternion::from_axis_angle(Vec3(0, 1, 0), 0.02);
  c.translation = Vec3(4.1, 0.02, -0.01);
  const StereoCalibration back = calibration_from_json(calibration_to_json(c));
  EXPECT_EQ(back.left.intrinsics.fx, 500);
  EXPECT_EQ(back.left.distortion.k3, 0.001);
  EXPECT_EQ(back.right.intrinsics.cy, 241);
  EXPECT_LT(angular_distance(back.rotation, c.rotation), 1e-12);
  EXPECT_EQ(back.translation, c.translation);
}

TEST(Calibration, AcceptsNestedRotationAndRejectsBadInput) {
  nlohmann::json j = calibration_to_json(StereoCalibration{
      {{100, 100, 10, 10, 20, 20}, {}}, {{100, 100, 10, 10, 20, 20}, {}}, {}, Vec3(1, 0, 0)});
  j["extrinsics"]["R"] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  EXPECT_NO_THROW(calibration_from_json(j));
  j["extrinsics"]["R"] = {{1, 0, 0}, {0, 1, 0}, {0, 0, -1}};
  EXPECT_EQ(code_of([&] { calibration_from_json(j); }), ErrorCode::kCalibration);
  j["extrinsics"].erase("R");
  EXPECT_EQ(code_of([&] { calibration_from_json(j); }), ErrorCode::kParse);
}

}  // namespace
}  // namespace endogeo
