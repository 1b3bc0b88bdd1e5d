// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "endogeo/error.hpp"
#include "endogeo/metrics.hpp"
#include "endogeo/sim.hpp"
#include "loss_fixtures.hpp"

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

Trajectory from_positions(const std::vector<Vec3>& pts) {
  Trajectory t;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    t.push_back(static_cast<FrameIndex>(i), Pose{Quaternion::identity(), pts[i]});
  }
  return t;
}

Trajectory transformed(const Trajectory& t, const SimilarityTransform& s) {
  Trajectory out;
  for (const auto& e : t) {
    out.push_back(e.frame, Pose{s.rotation * e.pose.rotation, s.apply(e.pose.translation)});
  }
  return out;
}

Trajectory orbit(std::uint64_t seed) {
  PathSpec p;
  p.seed = seed;
  p.n_frames = 60;
  return gen_trajectory(p);
}

TEST(Ate, Examples) {
  const Trajectory gt = orbit(1);
  EXPECT_LT(ate(gt, gt), 1e-9);
  SplitMix64 rng(71);
  const SimilarityTransform rigid{1.0, testing::random_rotation(rng), Vec3(10, -5, 3)};
  EXPECT_LT(ate(transformed(gt, rigid), gt), 1e-9);
  EXPECT_LT(ate(transformed(gt, rigid), gt, AlignMode::kSE3), 1e-9);
}

TEST(Ate, ScaledTriangleUnderRigidAlignment) {
  // gt {(0,0,0),(2,0,0),(0,2,0)}, pred = 2 gt. Centered clouds differ by a
  // factor of 2, so the rigid residual is the centered gt norm: RMS 4/3.
  const Trajectory gt = from_positions({{0, 0, 0}, {2, 0, 0}, {0, 2, 0}});
  const Trajectory pred = from_positions({{0, 0, 0}, {4, 0, 0}, {0, 4, 0}});
  EXPECT_NEAR(ate(pred, gt, AlignMode::kSE3), 4.0 / 3.0, 1e-12);
  EXPECT_LT(ate(pred, gt, AlignMode::kSim3), 1e-12);
}

TEST(Ate, Errors) {
  const Trajectory two = from_positions({{0, 0, 0}, {2, 0, 0}});
  EXPECT_EQ(code_of([&] { ate(two, two); }), ErrorCode::kAlignment);
  const Trajectory gt = orbit(2);
  EXPECT_EQ(code_of([&] { ate(gt.slice(0, 10), gt); }), ErrorCode::kDimensionMismatch);
}

TEST(Ate, Sim3InvariantToGlobalSimilarity) {
  SplitMix64 rng(72);
  const Trajectory gt = orbit(3);
  const Trajectory pred = inject_drift(gt, DriftSpec{2e-3, 0.05, 3});
  const double base = ate(pred, gt);
  for (int i = 0; i < 20; ++i) {
    const SimilarityTransform s{rng.uniform(0.1, 10), testing::random_rotation(rng),
                                testing::random_vec3(rng, -100, 100)};
    EXPECT_NEAR(ate(transformed(pred, s), gt), base, 1e-9);
  }
}

TEST(Rte, Examples) {
  const Trajectory gt = orbit(4);
  EXPECT_LT(rte(gt, gt).rte_mm, 1e-12);
  SplitMix64 rng(73);
  const SimilarityTransform rigid{1.0, testing::random_rotation(rng), Vec3(4, 5, 6)};
  EXPECT_LT(rte(transformed(gt, rigid), gt).rte_mm, 1e-9);
  EXPECT_LT(rte(gt, transformed(gt, rigid)).rte_mm, 1e-9);
}

TEST(Rte, StraightLineScaleError) {
  std::vector<Vec3> g, p;
  for (int k = 0; k < 40; ++k) {
    g.emplace_back(k, 0, 0);
    p.emplace_back(1.1 * k, 0, 0);
  }
  const RteResult r = rte(from_positions(p), from_positions(g), 16);
  EXPECT_NEAR(r.rte_mm, 1.6, 1e-12);
  EXPECT_EQ(r.pairs, 24u);
}

TEST(Rte, InvariantToRigidTransformOfEither) {
  SplitMix64 rng(74);
  const Trajectory gt = orbit(5);
  const Trajectory pred = inject_drift(gt, DriftSpec{2e-3, 0.05, 5});
  const double base = rte(pred, gt).rte_mm;
  for (int i = 0; i < 10; ++i) {
    const SimilarityTransform s{1.0, testing::random_rotation(rng),
                                testing::random_vec3(rng, -100, 100)};
    EXPECT_NEAR(rte(transformed(pred, s), gt).rte_mm, base, 1e-9);
    EXPECT_NEAR(rte(pred, transformed(gt, s)).rte_mm, base, 1e-9);
  }
}

TEST(Rte, TooShort) {
  const Trajectory gt = orbit(6).slice(0, 15);
  EXPECT_EQ(code_of([&] { rte(gt, gt, 16); }), ErrorCode::kEmptySet);
}

DepthEvalConfig small(bool scaling) {
  DepthEvalConfig c;
  c.eval_width = 8;
  c.eval_height = 6;
  c.median_scaling = scaling;
  return c;
}

DepthMap random_depth(SplitMix64& rng, int w, int h) {
  DepthMap d(w, h);
  for (double& v : d.values()) v = rng.uniform(5, 140);
  return d;
}

TEST(DepthMetrics, Examples) {
  SplitMix64 rng(75);
  const DepthMap gt = random_depth(rng, 8, 6);
  const DepthMetrics same = depth_metrics(gt, gt, small(false));
  EXPECT_EQ(same.abs_rel, 0.0);
  EXPECT_EQ(same.sq_rel, 0.0);
  EXPECT_EQ(same.rmse, 0.0);
  EXPECT_EQ(same.rmse_log, 0.0);
  EXPECT_EQ(same.delta_1_25, 1.0);

  DepthMap p125 = gt, p2 = gt;
  for (double& v : p125.values()) v *= 1.25;
  for (double& v : p2.values()) v *= 2.0;
  const DepthMetrics boundary = depth_metrics(p125, gt, small(false));
  EXPECT_NEAR(boundary.abs_rel, 0.25, 1e-12);
  EXPECT_EQ(boundary.delta_1_25, 0.0);

  const DepthMetrics scaled = depth_metrics(p2, gt, small(true));
  EXPECT_NEAR(scaled.abs_rel, 0.0, 1e-15);
  EXPECT_NEAR(scaled.rmse, 0.0, 1e-12);
  EXPECT_EQ(scaled.delta_1_25, 1.0);
  EXPECT_EQ(scaled.scale, 0.5);
}

TEST(DepthMetrics, RangeFilterAndEmptySet) {
  DepthMap gt(8, 6, 200.0);
  gt.set(0, 0, 50.0);
  const DepthMetrics m = depth_metrics(DepthMap(8, 6, 50.0), gt, small(false));
  EXPECT_EQ(m.pixels, 1u);
  EXPECT_EQ(code_of([] { depth_metrics(DepthMap(8, 6, 1.0), DepthMap(8, 6, 500.0), small(true)); }),
            ErrorCode::kEmptySet);
}

TEST(DepthMetrics, DeltaMonotoneInUniformError) {
  SplitMix64 rng(76);
  const DepthMap gt = random_depth(rng, 8, 6);
  DepthMap noisy = gt;
  for (double& v : noisy.values()) v *= rng.uniform(0.8, 1.2);
  double previous = 2.0;
  for (double k = 1.0; k < 2.0; k += 0.05) {
    DepthMap p = noisy;
    for (double& v : p.values()) v *= k;
    const double d = depth_metrics(p, gt, small(false)).delta_1_25;
    EXPECT_LE(d, previous);
    previous = d;
  }
}

TEST(DepthMetrics, ResizeToEvalResolution) {
  const DepthMap gt(64, 48, 30.0);
  const DepthMap resized = resize_depth(gt, 256, 192);
  EXPECT_EQ(resized.width(), 256);
  for (double v : resized.values()) EXPECT_NEAR(v, 30.0, 1e-12);
  const DepthMetrics m = depth_metrics(gt, gt);
  EXPECT_EQ(m.pixels, 256u * 192u);
}

TEST(DepthMetrics, ResizeRespectsValidity) {
  DepthMap d(4, 4, 10.0);
  d.invalidate(0, 0);
  d.set(3, 3, 1000.0);
  d.invalidate(3, 3);
  const DepthMap r = resize_depth(d, 8, 8);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r.mask()[i]) {
      EXPECT_NEAR(r.values()[i], 10.0, 1e-12);
    }
  }
}

TEST(DepthMetrics, OracleAgreement) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_LE(testing::compare_with_oracle(testing::make_loss_fixture(seed)).metrics, 1e-12);
  }
}

TEST(Report, TableHasOneLinePerNumber) {
  const nlohmann::json j = {{"ate_mm", 1.5}, {"frames", 3}, {"mode", "sim3"}};
  const std::string t = format_table(j);
  EXPECT_NE(t.find("ate_mm"), std::string::npos);
  EXPECT_NE(t.find("frames"), std::string::npos);
  EXPECT_EQ(t.find("mode"), std::string::npos);
}

TEST(AlignMode, Parse) {
  EXPECT_EQ(parse_align_mode("sim3"), AlignMode::kSim3);
  EXPECT_EQ(parse_align_mode("se3"), AlignMode::kSE3);
  EXPECT_EQ(code_of([] { parse_align_mode("affine"); }), ErrorCode::kConfig);
}

}  // namespace
}  // namespace endogeo
