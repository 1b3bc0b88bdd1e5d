// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "endogeo/raster.hpp"
#include "endogeo/trajectory.hpp"

namespace endogeo {

enum class AlignMode { kSim3, kSE3 };

AlignMode parse_align_mode(const std::string& name);
const char* to_string(AlignMode mode);

/// Position RMSE after aligning pred onto gt with umeyama_align. Both
/// trajectories must carry identical frame sets of at least 3 frames.
double ate(const Trajectory& pred, const Trajectory& gt, AlignMode mode = AlignMode::kSim3);

struct RteResult {
  double rte_mm = 0.0;   // RMSE of relative translation error
  double rre_rad = 0.0;  // RMSE of relative rotation error (diagnostic)
  std::size_t pairs = 0;
};

/// Windowed relative error over entry pairs (i, i + window):
/// E_i = (gt_i^-1 gt_{i+w})^-1 (pred_i^-1 pred_{i+w}).
RteResult rte(const Trajectory& pred, const Trajectory& gt, std::size_t window = 16);

struct DepthEvalConfig {
  int eval_width = 256;
  int eval_height = 192;
  double depth_min = 0.1;    // mm
  double depth_max = 150.0;  // mm
  bool median_scaling = true;

  void validate() const;
};

struct DepthMetrics {
  double abs_rel = 0.0;
  double sq_rel = 0.0;
  double rmse = 0.0;
  double rmse_log = 0.0;
  double delta_1_25 = 0.0;
  std::size_t pixels = 0;
  double scale = 1.0;  // median-scaling factor applied to pred
};

/// Bilinear resize with validity-aware weights (pixel-center alignment).
/// Same-size input is returned unchanged.
DepthMap resize_depth(const DepthMap& depth, int width, int height);

/// Five standard depth metrics at the evaluation resolution. Valid pixels have
/// gt in [depth_min, depth_max] and a positive prediction. delta counts
/// max(p/g, g/p) < 1.25 strictly.
DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt,
                           const DepthEvalConfig& cfg = {});

// Two-column text rendering of a flat JSON object of numbers.
std::string format_table(const nlohmann::json& metrics);

}  // namespace endogeo
