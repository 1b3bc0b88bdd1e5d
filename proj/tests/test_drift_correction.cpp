// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <numbers>

#include "endogeo/drift_correction.hpp"
#include "endogeo/error.hpp"
#include "endogeo/metrics.hpp"
#include "endogeo/sim.hpp"
#include "test_support.hpp"

namespace endogeo {
namespace {

using testing::pose_gap;
using testing::random_pose;

LocalSegment segment_of(const Trajectory& t) {
  return {t, t.front().frame, t.back().frame};
}

Trajectory straight_line(int n) {
  Trajectory t;
  for (int k = 0; k < n; ++k) t.push_back(k, Pose{Quaternion::identity(), Vec3::Zero()});
  return t;
}

TEST(AlignStart, NoOpWhenAlreadyAnchored) {
  SplitMix64 rng(31);
  const Trajectory t = testing::random_trajectory(rng, 5);
  const LocalSegment out = align_segment_start(segment_of(t), t.front().pose);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_LT(pose_gap(out.trajectory[i].pose, t[i].pose), 1e-9);
  }
}

TEST(AlignStart, TranslatesIdentityStart) {
  Trajectory t;
  t.push_back(0, Pose::identity());
  t.push_back(1, Pose{Quaternion::from_axis_angle(Vec3::UnitY(), 0.3), Vec3(1, 2, 3)});
  const Pose anchor{Quaternion::identity(), Vec3(5, 0, 0)};
  const LocalSegment out = align_segment_start(segment_of(t), anchor);
  EXPECT_EQ(out.trajectory[0].pose.translation, Vec3(5, 0, 0));
  EXPECT_LT((out.trajectory[1].pose.translation - Vec3(6, 2, 3)).norm(), 1e-12);
}

TEST(AlignStart, PreservesRelativePosesAndHitsAnchorExactly) {
  SplitMix64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const Trajectory t = testing::random_trajectory(rng, 6);
    const Pose anchor = random_pose(rng);
    const LocalSegment out = align_segment_start(segment_of(t), anchor);
    EXPECT_EQ(out.trajectory[0].pose.rotation.coeffs(), anchor.rotation.coeffs());
    EXPECT_EQ(out.trajectory[0].pose.translation, anchor.translation);
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t j = 0; j < t.size(); ++j) {
        const Pose before = compose(inverse(t[i].pose), t[j].pose);
        const Pose after = compose(inverse(out.trajectory[i].pose), out.trajectory[j].pose);
        EXPECT_LT(pose_gap(before, after), 1e-9);
      }
    }
  }
}

TEST(DriftError, Examples) {
  SplitMix64 rng(33);
  const Pose p = random_pose(rng);
  EXPECT_LT(pose_gap(compute_drift_error(p, p), Pose::identity()), 1e-12);
  const Pose e =
      compute_drift_error(Pose::identity(), Pose{Quaternion::identity(), Vec3(0, 0, 3)});
  EXPECT_EQ(e.translation, Vec3(0, 0, 3));
  for (int i = 0; i < 100; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng);
    EXPECT_LT(pose_gap(compose(compute_drift_error(a, b), a), b), 1e-12);
  }
}

TEST(Distribute, IdentityErrorLeavesSegment) {
  SplitMix64 rng(34);
  const Trajectory t = testing::random_trajectory(rng, 5);
  const LocalSegment out = distribute_drift(segment_of(t), Pose::identity());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_LT(pose_gap(out.trajectory[i].pose, t[i].pose), 1e-12);
  }
}

TEST(Distribute, LinearTranslation) {
  const LocalSegment out = distribute_drift(segment_of(straight_line(5)),
                                            Pose{Quaternion::identity(), Vec3(4, 0, 0)});
  for (int k = 0; k < 5; ++k) {
    EXPECT_LT((out.trajectory[k].pose.translation - Vec3(k, 0, 0)).norm(), 1e-12);
  }
}

TEST(Distribute, SlerpMidpoint) {
  const Pose e{Quaternion::from_axis_angle(Vec3::UnitZ(), std::numbers::pi / 3), Vec3::Zero()};
  const LocalSegment out = distribute_drift(segment_of(straight_line(3)), e);
  EXPECT_NEAR(out.trajectory[1].pose.rotation.angle(), std::numbers::pi / 6, 1e-12);
  EXPECT_LT(pose_gap(out.trajectory[0].pose, Pose::identity()), 1e-15);
}

TEST(Distribute, FractionFollowsFrameIndex) {
  Trajectory t;
  for (FrameIndex f : {10, 11, 15, 20}) t.push_back(f, Pose::identity());
  const LocalSegment out =
      distribute_drift(segment_of(t), Pose{Quaternion::identity(), Vec3(10, 0, 0)});
  EXPECT_NEAR(out.trajectory[1].pose.translation.x(), 1.0, 1e-12);
  EXPECT_NEAR(out.trajectory[2].pose.translation.x(), 5.0, 1e-12);
  EXPECT_EQ(out.trajectory[3].pose.translation.x(), 10.0);
}

TEST(Distribute, LastPoseLandsOnAnchor) {
  SplitMix64 rng(35);
  for (int trial = 0; trial < 50; ++trial) {
    const Trajectory t = testing::random_trajectory(rng, 7);
    const Pose anchor = random_pose(rng);
    const Pose e = compute_drift_error(t.back().pose, anchor);
    const LocalSegment out = distribute_drift(segment_of(t), e);
    EXPECT_LT(pose_gap(out.trajectory.back().pose, anchor), 1e-9);
  }
}

TEST(Distribute, SingleEntryIsDegenerate) {
  Trajectory t;
  t.push_back(0, Pose::identity());
  try {
    distribute_drift({t, 0, 0}, Pose::identity());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateSegment);
  }
}

TEST(Distribute, AdjacentPerturbationBounded) {
  SplitMix64 rng(36);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform() * 15);
    Trajectory t;
    Pose p = random_pose(rng);
    for (int k = 0; k < n; ++k) {
      t.push_back(k, p);
      p = compose(p, Pose{Quaternion::from_rotation_vector(testing::random_vec3(rng, -0.05, 0.05)),
                          testing::random_vec3(rng, -1, 1)});
    }
    const Pose e{Quaternion::from_rotation_vector(testing::random_vec3(rng, -0.3, 0.3)),
                 testing::random_vec3(rng, -5, 5)};
    const LocalSegment out = distribute_drift(segment_of(t), e);
    for (int k = 0; k + 1 < n; ++k) {
      const Pose before = compose(inverse(t[k].pose), t[k + 1].pose);
      const Pose after = compose(inverse(out.trajectory[k].pose), out.trajectory[k + 1].pose);
      EXPECT_LE(angular_distance(before.rotation, after.rotation),
                e.rotation.angle() / (n - 1) + 1e-9);
    }
  }
}

struct Scenario {
  Trajectory gt;
  AnchorSet anchors;
  std::vector<LocalSegment> segments;
};

Scenario simulated(std::uint64_t seed) {
  PathSpec path;
  path.seed = seed;
  const Trajectory gt = gen_trajectory(path);
  AnchorSet anchors = anchors_from(gt, 16);
  auto segments = simulate_segments(gt, anchors, DriftSpec{2e-3, 0.05, seed});
  return {gt, std::move(anchors), std::move(segments)};
}

TEST(Correct, ExactSegmentsReproduceGroundTruth) {
  PathSpec path;
  path.seed = 3;
  const Trajectory gt = gen_trajectory(path);
  const AnchorSet anchors = anchors_from(gt, 16);
  const auto result = correct_long_trajectory(anchors, split_into_segments(gt, anchors));
  ASSERT_EQ(result.trajectory.frames(), gt.frames());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    EXPECT_LT(pose_gap(result.trajectory[i].pose, gt[i].pose), 1e-9);
  }
  for (const auto& s : result.report.segments) {
    EXPECT_LT(s.rotation_rad, 1e-9);
    EXPECT_LT(s.translation_mm, 1e-9);
  }
}

TEST(Correct, SingleSegmentMatchesDistribute) {
  Trajectory anchors;
  anchors.push_back(0, Pose::identity());
  anchors.push_back(4, Pose{Quaternion::identity(), Vec3(4, 0, 0)});
  const auto result =
      correct_long_trajectory(AnchorSet(anchors, 4), {segment_of(straight_line(5))});
  for (int k = 0; k < 5; ++k) {
    EXPECT_LT((result.trajectory[k].pose.translation - Vec3(k, 0, 0)).norm(), 1e-12);
  }
  ASSERT_EQ(result.report.segments.size(), 1u);
  EXPECT_NEAR(result.report.segments[0].translation_mm, 4.0, 1e-12);
}

TEST(Correct, MissingSegmentNamesGap) {
  const Scenario s = simulated(1);
  auto segments = s.segments;
  segments.erase(segments.begin() + 2);
  try {
    correct_long_trajectory(s.anchors, segments);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoverage);
    EXPECT_NE(std::string(e.what()).find("[32, 48]"), std::string::npos) << e.what();
  }
}

TEST(Correct, PassesThroughAnchorsAndReducesDrift) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scenario s = simulated(seed);
    const auto result = correct_long_trajectory(s.anchors, s.segments);
    ASSERT_EQ(result.trajectory.frames(), s.gt.frames());
    for (const auto& a : s.anchors.trajectory()) {
      const Pose& got = result.trajectory[result.trajectory.find(a.frame)].pose;
      EXPECT_LT(angular_distance(got.rotation, a.pose.rotation), 1e-9);
      EXPECT_LT((got.translation - a.pose.translation).norm(), 1e-9);
    }
    for (const auto& r : result.report.anchor_residuals) {
      EXPECT_LT(r.rotation_rad, 1e-9);
      EXPECT_LT(r.translation_mm, 1e-9);
    }
    const Trajectory drifted = inject_drift(s.gt, DriftSpec{2e-3, 0.05, seed});
    EXPECT_LT(ate(result.trajectory, s.gt), ate(drifted, s.gt));
  }
}

TEST(Correct, Idempotent) {
  const Scenario s = simulated(7);
  const auto once = correct_long_trajectory(s.anchors, s.segments);
  const auto twice =
      correct_long_trajectory(s.anchors, split_into_segments(once.trajectory, s.anchors));
  for (std::size_t i = 0; i < once.trajectory.size(); ++i) {
    EXPECT_LT(pose_gap(once.trajectory[i].pose, twice.trajectory[i].pose), 1e-9);
  }
}

}  // namespace
}  // namespace endogeo
