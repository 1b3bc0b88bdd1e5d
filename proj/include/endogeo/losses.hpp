// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Evaluators for the hybrid training objective: confidence-weighted pointmap
// regression, pose regression, and the self-supervised multi-view consistency
// composite (flow, temporal depth, geometric prior). These return values only;
// no gradients.
//
// Reductions: the supervised terms are sums, every consistency term is a mean
// over its valid pixels.

#pragma once

#include <span>

#include "endogeo/geometry.hpp"
#include "endogeo/raster.hpp"

namespace endogeo {

struct LossConfig {
  double alpha = 0.2;           // confidence regularizer
  double lambda_consist = 0.1;  // weight of the consistency composite
  double w_flow = 1.0;
  double w_temp = 1.0;
  double w_prior = 1.0;
  double w_si = 1.0;
  double w_grad = 1.0;
  double w_normal = 1.0;
  // Stands in for a per-pixel uncertainty map; multiplies the flow and
  // temporal terms.
  double uncertainty_constant = 1.0;

  // Throws kConfig unless alpha > 0 and every weight is finite and >= 0.
  void validate() const;
};

/// Scale normalizers for predicted and reference sets.
struct NormalizationSpec {
  double s_hat = 1.0;
  double s = 1.0;

  void validate() const;
};

struct PixelLoss {
  double value = 0.0;
  ScalarRaster per_pixel;  // contribution of each valid pixel; others masked
  std::size_t count = 0;   // pixels that entered the reduction
};

/// Mean Euclidean norm of the valid points. Throws kEmptySet if none.
double point_set_scale(const Pointmap& points);

/// Sum over jointly valid pixels of c * ||x_hat/s_hat - x/s|| - alpha * log c,
/// with s_hat and s the point_set_scale of each map. per_pixel sums to value.
PixelLoss conf_loss(const Pointmap& pred, const Pointmap& ref, const ConfidenceMap& conf,
                    const LossConfig& cfg);

/// Sum over frames of ||q_hat - q|| (sign of q_hat chosen to minimize it) plus
/// ||t_hat/s_hat - t/s||.
double pose_loss(std::span<const Pose> pred, std::span<const Pose> ref,
                 const NormalizationSpec& norms);

/// Target pixel coordinates in view j of every pixel of view i, given depth
/// in view i and the camera-i-to-camera-j transform. Pixels with invalid depth
/// or landing behind camera j are masked.
CoordinateMap induced_reprojection(const DepthMap& depth_i, const CameraIntrinsics& k_i,
                                   const CameraIntrinsics& k_j, const Pose& g_ij);

/// Mean L1 distance between the induced reprojection and p + flow(p). Pixels
/// whose reprojection or flow target leaves image j are excluded.
PixelLoss c_flow(const DepthMap& depth_i, const CameraIntrinsics& k_i,
                 const CameraIntrinsics& k_j, const Pose& g_ij, const FlowField& flow);

/// Mean of max(r, 1/r) - 1 with r the depth of p carried into view j over the
/// depth of view j bilinearly sampled at p + flow(p).
PixelLoss c_temp(const DepthMap& depth_i, const DepthMap& depth_j,
                 const CameraIntrinsics& k_i, const CameraIntrinsics& k_j,
                 const Pose& g_ij, const FlowField& flow);

struct PriorBreakdown {
  double c_si = 0.0;
  double c_grad = 0.0;
  double c_normal = 0.0;
  double total = 0.0;
  std::size_t count = 0;
};

/// Geometric prior between a depth map and a reference depth map:
///  - c_si: variance of g = log D - log D_ref over jointly valid pixels;
///  - c_grad: sum over 4 dyadic scales (2x2 average pooling of g; a pooled
///    pixel is valid only if all four children are) of
///    (sum |dx g| + sum |dy g|) / valid pixels, forward differences;
///  - c_normal: mean 1 - cos between surface normals obtained from central
///    differences of the back-projected points (interior pixels only).
PriorBreakdown c_prior(const DepthMap& depth, const DepthMap& reference,
                       const CameraIntrinsics& k, const LossConfig& cfg);

struct ConsistencyTerms {
  double c_flow = 0.0;
  double c_temp = 0.0;
  double c_prior = 0.0;
};

struct ConsistencyBreakdown {
  ConsistencyTerms terms;
  double weighted_flow = 0.0;
  double weighted_temp = 0.0;
  double weighted_prior = 0.0;
  double total = 0.0;
};

/// w_flow*u*C_flow + w_temp*u*C_temp + w_prior*C_prior, u the uncertainty
/// constant.
ConsistencyBreakdown consistency_total(const ConsistencyTerms& terms, const LossConfig& cfg);

struct ConsistencyInputs {
  const DepthMap& depth_i;
  const DepthMap& depth_j;
  CameraIntrinsics k_i;
  CameraIntrinsics k_j;
  Pose g_ij;  // camera i -> camera j
  const FlowField& flow_ij;
  // Reference for the prior term on depth_i; without one the prior is 0.
  const DepthMap* prior_reference = nullptr;
};

struct ConsistencyEvaluation {
  ConsistencyBreakdown breakdown;
  PriorBreakdown prior;
  std::size_t flow_pixels = 0;
  std::size_t temp_pixels = 0;
};

/// Evaluates all three consistency terms for one view pair. Terms whose
/// weight is zero are skipped (reported as 0).
ConsistencyEvaluation evaluate_consistency(const ConsistencyInputs& in, const LossConfig& cfg);

/// (L_conf + L_pose) + lambda_consist * L_consistency.
double total_loss(double conf, double pose, double consistency, const LossConfig& cfg);

}  // namespace endogeo
