// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "endogeo/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "endogeo/error.hpp"

namespace endogeo {

namespace {

void check_order(FrameIndex previous, FrameIndex next) {
  if (next <= previous) {
    throw Error(ErrorCode::kOrdering,
                "frame indices must be strictly increasing: " +
                    std::to_string(next) + " follows " + std::to_string(previous));
  }
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

double parse_number(std::string_view field, std::size_t line) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && field.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw Error(ErrorCode::kParse,
                "malformed number '" + std::string(field) + "'", line);
  }
  return v;
}

}  // namespace

Trajectory::Trajectory(std::vector<TrajectoryEntry> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].frame < 0) {
      throw Error(ErrorCode::kOrdering, "negative frame index");
    }
    if (i > 0) check_order(entries_[i - 1].frame, entries_[i].frame);
  }
}

void Trajectory::push_back(FrameIndex frame, const Pose& pose) {
  if (frame < 0) throw Error(ErrorCode::kOrdering, "negative frame index");
  if (!entries_.empty()) check_order(entries_.back().frame, frame);
  entries_.push_back({frame, pose});
}

std::size_t Trajectory::find(FrameIndex frame) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), frame,
      [](const TrajectoryEntry& e, FrameIndex f) { return e.frame < f; });
  if (it == entries_.end() || it->frame != frame) return npos;
  return static_cast<std::size_t>(it - entries_.begin());
}

std::vector<FrameIndex> Trajectory::frames() const {
  std::vector<FrameIndex> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.frame);
  return out;
}

std::vector<Vec3> Trajectory::positions() const {
  std::vector<Vec3> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.pose.translation);
  return out;
}

Trajectory Trajectory::slice(FrameIndex first, FrameIndex last) const {
  Trajectory out;
  for (const auto& e : entries_) {
    if (e.frame >= first && e.frame <= last) out.entries_.push_back(e);
  }
  return out;
}

void Trajectory::require_non_empty(const char* what) const {
  if (entries_.empty()) {
    throw Error(ErrorCode::kEmptySet, std::string(what) + ": trajectory is empty");
  }
}

AnchorSet::AnchorSet(Trajectory trajectory, FrameIndex stride)
    : trajectory_(std::move(trajectory)), stride_(stride) {
  if (stride_ <= 0) throw Error(ErrorCode::kConfig, "anchor stride must be positive");
  const std::size_t n = trajectory_.size();
  for (std::size_t i = 1; i < n; ++i) {
    const FrameIndex gap = trajectory_[i].frame - trajectory_[i - 1].frame;
    const bool tail = i + 1 == n;
    if (gap != stride_ && !(tail && gap < stride_)) {
      throw Error(ErrorCode::kCoverage,
                  "anchor gap " + std::to_string(trajectory_[i - 1].frame) + "->" +
                      std::to_string(trajectory_[i].frame) +
                      " does not match stride " + std::to_string(stride_));
    }
  }
}

void LocalSegment::validate() const {
  if (trajectory.empty() || trajectory.front().frame != start_anchor_frame ||
      trajectory.back().frame != end_anchor_frame) {
    throw Error(ErrorCode::kCoverage,
                "segment does not span anchor gap [" +
                    std::to_string(start_anchor_frame) + ", " +
                    std::to_string(end_anchor_frame) + "]");
  }
}

Trajectory parse_tum(std::string_view text, const TumParseOptions& options) {
  Trajectory out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    const auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 8) {
      throw Error(ErrorCode::kParse,
                  "expected 8 fields 't tx ty tz qx qy qz qw', got " +
                      std::to_string(fields.size()),
                  line_no);
    }
    double v[8];
    for (int i = 0; i < 8; ++i) v[i] = parse_number(fields[i], line_no);

    if (v[0] < 0.0 || v[0] != std::floor(v[0]) || v[0] > 9.0e15) {
      throw Error(ErrorCode::kParse,
                  "frame index must be a non-negative integer", line_no);
    }
    const double norm = std::sqrt(v[4] * v[4] + v[5] * v[5] + v[6] * v[6] + v[7] * v[7]);
    if (norm == 0.0) {
      throw Error(ErrorCode::kParse, "zero quaternion", line_no);
    }
    if (options.warnings && std::abs(norm - 1.0) > 1e-3) {
      options.warnings->push_back("line " + std::to_string(line_no) +
                                  ": quaternion norm " + std::to_string(norm) +
                                  " renormalized");
    }
    Pose pose{Quaternion(v[7], v[4], v[5], v[6]), Vec3(v[1], v[2], v[3])};
    try {
      out.push_back(static_cast<FrameIndex>(v[0]), pose);
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), line_no);
    }
  }
  return out;
}

std::string serialize_tum(const Trajectory& trajectory) {
  std::string out;
  char buf[512];
  for (const auto& e : trajectory) {
    const auto& t = e.pose.translation;
    const auto& q = e.pose.rotation;
    const int n = std::snprintf(
        buf, sizeof(buf), "%lld %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
        static_cast<long long>(e.frame), t.x(), t.y(), t.z(), q.x(), q.y(), q.z(),
        q.w());
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

Trajectory read_tum_file(const std::string& path, const TumParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open trajectory file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_tum(ss.str(), options);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_tum_file(const std::string& path, const Trajectory& trajectory) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write trajectory file '" + path + "'");
  out << serialize_tum(trajectory);
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

std::vector<LocalSegment> split_into_segments(const Trajectory& local,
                                              const AnchorSet& anchors) {
  const Trajectory& a = anchors.trajectory();
  if (a.size() < 2) {
    throw Error(ErrorCode::kCoverage, "segmentation needs at least 2 anchors, got " +
                                          std::to_string(a.size()));
  }
  local.require_non_empty("split_into_segments");
  if (local.front().frame < a.front().frame || local.back().frame > a.back().frame) {
    throw Error(ErrorCode::kCoverage,
                "local trajectory extends beyond the anchor range [" +
                    std::to_string(a.front().frame) + ", " +
                    std::to_string(a.back().frame) + "]");
  }
  for (const auto& anchor : a) {
    if (local.find(anchor.frame) == Trajectory::npos) {
      throw Error(ErrorCode::kCoverage, "local trajectory is missing anchor frame " +
                                            std::to_string(anchor.frame));
    }
  }
  std::vector<LocalSegment> out;
  out.reserve(a.size() - 1);
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    out.push_back({local.slice(a[k].frame, a[k + 1].frame), a[k].frame, a[k + 1].frame});
  }
  return out;
}

}  // namespace endogeo
