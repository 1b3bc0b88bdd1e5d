// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "endogeo/geometry.hpp"

namespace endogeo {

using FrameIndex = std::int64_t;

struct TrajectoryEntry {
  FrameIndex frame = 0;
  Pose pose;
};

/// Frame-indexed camera-to-world poses with strictly increasing frame indices.
/// The frame index doubles as the timestamp.
class Trajectory {
 public:
  Trajectory() = default;
  // Throws kOrdering unless frame indices are non-negative and strictly
  // increasing.
  explicit Trajectory(std::vector<TrajectoryEntry> entries);

  const std::vector<TrajectoryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const TrajectoryEntry& operator[](std::size_t i) const { return entries_[i]; }
  const TrajectoryEntry& front() const { return entries_.front(); }
  const TrajectoryEntry& back() const { return entries_.back(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // Appends; throws kOrdering if frame does not exceed the last index.
  void push_back(FrameIndex frame, const Pose& pose);

  // Position of `frame`, or npos.
  std::size_t find(FrameIndex frame) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<FrameIndex> frames() const;
  std::vector<Vec3> positions() const;

  // Entries with frame in [first, last].
  Trajectory slice(FrameIndex first, FrameIndex last) const;

  // Throws kEmptySet with `what` in the message when empty.
  void require_non_empty(const char* what) const;

 private:
  std::vector<TrajectoryEntry> entries_;
};

/// Sparse globally-stable reference poses. Consecutive anchors are exactly
/// `stride` frames apart, except that the final gap may be shorter.
class AnchorSet {
 public:
  AnchorSet(Trajectory trajectory, FrameIndex stride);

  const Trajectory& trajectory() const { return trajectory_; }
  FrameIndex stride() const { return stride_; }
  std::size_t size() const { return trajectory_.size(); }

 private:
  Trajectory trajectory_;
  FrameIndex stride_;
};

/// Dense local poses spanning one anchor gap, boundary frames included.
struct LocalSegment {
  Trajectory trajectory;
  FrameIndex start_anchor_frame = 0;
  FrameIndex end_anchor_frame = 0;

  // Throws kCoverage unless the first/last entries sit on the anchor frames.
  void validate() const;
};

struct TumParseOptions {
  // Receives one message per quaternion whose norm deviates from 1 by > 1e-3.
  std::vector<std::string>* warnings = nullptr;
};

/// Parses "frame tx ty tz qx qy qz qw" lines; '#' lines and blank lines are
/// skipped. The first field must hold a non-negative integer frame index.
Trajectory parse_tum(std::string_view text, const TumParseOptions& options = {});
/// Writes one line per entry with 17 significant digits, '\n' terminated.
std::string serialize_tum(const Trajectory& trajectory);

Trajectory read_tum_file(const std::string& path,
                         const TumParseOptions& options = {});
void write_tum_file(const std::string& path, const Trajectory& trajectory);

/// Cuts `local` at every anchor frame. Segment k spans anchors k and k+1 and
/// shares its end frame with the start of segment k+1.
std::vector<LocalSegment> split_into_segments(const Trajectory& local,
                                              const AnchorSet& anchors);

}  // namespace endogeo
