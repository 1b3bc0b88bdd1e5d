// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Long-sequence drift correction. A sparse anchor trajectory pins the global
// frame; every dense local segment is rigidly moved onto its start anchor, its
// residual against the end anchor is measured as a left (world-frame) error,
// and that error is spread across the segment before stitching.

#pragma once

#include <vector>

#include "endogeo/geometry.hpp"
#include "endogeo/trajectory.hpp"

namespace endogeo {

struct SegmentDrift {
  FrameIndex start_frame = 0;
  FrameIndex end_frame = 0;
  double rotation_rad = 0.0;
  double translation_mm = 0.0;
};

struct AnchorResidual {
  FrameIndex frame = 0;
  double rotation_rad = 0.0;
  double translation_mm = 0.0;
};

struct CorrectionReport {
  std::vector<SegmentDrift> segments;
  // Distance between each anchor and the distributed pose that lands on it,
  // measured before the boundary frame is snapped to the anchor.
  std::vector<AnchorResidual> anchor_residuals;
};

/// Left-multiplies every pose by anchor * first^-1. The first pose becomes
/// `anchor_pose` exactly.
LocalSegment align_segment_start(const LocalSegment& segment, const Pose& anchor_pose);

/// E = next_anchor * aligned_end^-1, so that E * aligned_end = next_anchor.
Pose compute_drift_error(const Pose& aligned_end, const Pose& next_anchor);

/// Applies pose_interp(E, t_i) on the left of pose i, with t_i linear in the
/// frame index from 0 at the first entry to 1 at the last.
/// Throws kDegenerateSegment for fewer than two entries.
LocalSegment distribute_drift(const LocalSegment& segment, const Pose& error);

struct CorrectionResult {
  Trajectory trajectory;
  CorrectionReport report;
};

/// Corrects and stitches one segment per consecutive anchor pair. Boundary
/// frames take the anchor pose. Throws kCoverage when a gap has no matching
/// segment.
CorrectionResult correct_long_trajectory(const AnchorSet& anchors,
                                         const std::vector<LocalSegment>& segments);

}  // namespace endogeo
