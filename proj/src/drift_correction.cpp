// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "endogeo/drift_correction.hpp"

#include "endogeo/error.hpp"

namespace endogeo {

namespace {

std::string gap_name(FrameIndex a, FrameIndex b) {
  return "[" + std::to_string(a) + ", " + std::to_string(b) + "]";
}

}  // namespace

LocalSegment align_segment_start(const LocalSegment& segment, const Pose& anchor_pose) {
  segment.trajectory.require_non_empty("align_segment_start");
  const Pose t = compose(anchor_pose, inverse(segment.trajectory.front().pose));
  std::vector<TrajectoryEntry> entries;
  entries.reserve(segment.trajectory.size());
  for (const auto& e : segment.trajectory) {
    entries.push_back({e.frame, compose(t, e.pose)});
  }
  entries.front().pose = anchor_pose;
  return {Trajectory(std::move(entries)), segment.start_anchor_frame,
          segment.end_anchor_frame};
}

Pose compute_drift_error(const Pose& aligned_end, const Pose& next_anchor) {
  return compose(next_anchor, inverse(aligned_end));
}

LocalSegment distribute_drift(const LocalSegment& segment, const Pose& error) {
  const Trajectory& traj = segment.trajectory;
  if (traj.size() < 2) {
    throw Error(ErrorCode::kDegenerateSegment,
                "segment " + gap_name(segment.start_anchor_frame,
                                      segment.end_anchor_frame) +
                    " has fewer than 2 frames");
  }
  const FrameIndex first = traj.front().frame;
  const double span = static_cast<double>(traj.back().frame - first);
  std::vector<TrajectoryEntry> entries;
  entries.reserve(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& e = traj[i];
    double t = static_cast<double>(e.frame - first) / span;
    if (i + 1 == traj.size()) t = 1.0;
    entries.push_back({e.frame, compose(pose_interp(error, t), e.pose)});
  }
  return {Trajectory(std::move(entries)), segment.start_anchor_frame,
          segment.end_anchor_frame};
}

CorrectionResult correct_long_trajectory(const AnchorSet& anchors,
                                         const std::vector<LocalSegment>& segments) {
  const Trajectory& a = anchors.trajectory();
  if (a.size() < 2) {
    throw Error(ErrorCode::kCoverage, "drift correction needs at least 2 anchors");
  }
  const std::size_t gaps = a.size() - 1;
  for (std::size_t k = 0; k < gaps; ++k) {
    const FrameIndex s = a[k].frame, e = a[k + 1].frame;
    if (k >= segments.size() || segments[k].start_anchor_frame != s ||
        segments[k].end_anchor_frame != e) {
      throw Error(ErrorCode::kCoverage, "no segment covers anchor gap " + gap_name(s, e));
    }
    segments[k].validate();
  }
  if (segments.size() > gaps) {
    throw Error(ErrorCode::kCoverage,
                "segment " + gap_name(segments[gaps].start_anchor_frame,
                                      segments[gaps].end_anchor_frame) +
                    " lies outside the anchor range");
  }

  CorrectionResult result;
  std::vector<TrajectoryEntry> stitched;
  result.report.anchor_residuals.push_back({a[0].frame, 0.0, 0.0});

  for (std::size_t k = 0; k < gaps; ++k) {
    const LocalSegment aligned = align_segment_start(segments[k], a[k].pose);
    const Pose error = compute_drift_error(aligned.trajectory.back().pose, a[k + 1].pose);
    const LocalSegment corrected = distribute_drift(aligned, error);

    result.report.segments.push_back({a[k].frame, a[k + 1].frame,
                                      error.rotation.angle(),
                                      error.translation.norm()});
    const Pose& landed = corrected.trajectory.back().pose;
    result.report.anchor_residuals.push_back(
        {a[k + 1].frame, angular_distance(landed.rotation, a[k + 1].pose.rotation),
         (landed.translation - a[k + 1].pose.translation).norm()});

    const auto& entries = corrected.trajectory.entries();
    // Later segments repeat the previous segment's end frame.
    for (std::size_t i = k == 0 ? 0 : 1; i < entries.size(); ++i) {
      stitched.push_back(entries[i]);
    }
    if (k == 0) stitched.front().pose = a[0].pose;
    stitched.back().pose = a[k + 1].pose;
  }
  result.trajectory = Trajectory(std::move(stitched));
  return result;
}

}  // namespace endogeo
