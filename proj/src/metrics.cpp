// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "endogeo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "endogeo/error.hpp"

namespace endogeo {

AlignMode parse_align_mode(const std::string& name) {
  if (name == "sim3") return AlignMode::kSim3;
  if (name == "se3") return AlignMode::kSE3;
  throw Error(ErrorCode::kConfig, "unknown alignment mode '" + name + "' (sim3|se3)");
}

const char* to_string(AlignMode mode) { return mode == AlignMode::kSim3 ? "sim3" : "se3"; }

namespace {

void require_same_frames(const Trajectory& pred, const Trajectory& gt, const char* what) {
  if (pred.frames() != gt.frames()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": predicted and ground-truth frame sets differ");
  }
}

double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

double ate(const Trajectory& pred, const Trajectory& gt, AlignMode mode) {
  require_same_frames(pred, gt, "ate");
  if (gt.size() < 3) {
    throw Error(ErrorCode::kAlignment, "ate needs at least 3 frames");
  }
  const std::vector<Vec3> p = pred.positions();
  const std::vector<Vec3> g = gt.positions();
  const SimilarityTransform t = umeyama_align(p, g, mode == AlignMode::kSim3);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += (t.apply(p[i]) - g[i]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(p.size()));
}

RteResult rte(const Trajectory& pred, const Trajectory& gt, std::size_t window) {
  require_same_frames(pred, gt, "rte");
  if (window == 0) throw Error(ErrorCode::kConfig, "rte window must be positive");
  if (gt.size() <= window) {
    throw Error(ErrorCode::kEmptySet, "rte: trajectory of " + std::to_string(gt.size()) +
                                          " frames is too short for window " +
                                          std::to_string(window));
  }
  RteResult out;
  double trans_sq = 0.0, rot_sq = 0.0;
  for (std::size_t i = 0; i + window < gt.size(); ++i) {
    const Pose gt_rel = compose(inverse(gt[i].pose), gt[i + window].pose);
    const Pose pred_rel = compose(inverse(pred[i].pose), pred[i + window].pose);
    const Pose e = compose(inverse(gt_rel), pred_rel);
    trans_sq += e.translation.squaredNorm();
    const double angle = e.rotation.angle();
    rot_sq += angle * angle;
    ++out.pairs;
  }
  out.rte_mm = std::sqrt(trans_sq / static_cast<double>(out.pairs));
  out.rre_rad = std::sqrt(rot_sq / static_cast<double>(out.pairs));
  return out;
}

void DepthEvalConfig::validate() const {
  if (eval_width <= 0 || eval_height <= 0) {
    throw Error(ErrorCode::kConfig, "evaluation resolution must be positive");
  }
  if (!(depth_min > 0.0) || !(depth_min < depth_max) || !std::isfinite(depth_max)) {
    throw Error(ErrorCode::kConfig, "need 0 < depth_min < depth_max");
  }
}

DepthMap resize_depth(const DepthMap& depth, int width, int height) {
  if (depth.width() == width && depth.height() == height) return depth;
  if (depth.empty()) throw Error(ErrorCode::kEmptySet, "cannot resize an empty raster");
  DepthMap out(width, height, 0.0, false);
  const double sx = static_cast<double>(depth.width()) / width;
  const double sy = static_cast<double>(depth.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double v = std::clamp((y + 0.5) * sy - 0.5, 0.0, depth.height() - 1.0);
    const int y0 = static_cast<int>(std::floor(v));
    const int y1 = std::min(y0 + 1, depth.height() - 1);
    const double ay = v - y0;
    for (int x = 0; x < width; ++x) {
      const double u = std::clamp((x + 0.5) * sx - 0.5, 0.0, depth.width() - 1.0);
      const int x0 = static_cast<int>(std::floor(u));
      const int x1 = std::min(x0 + 1, depth.width() - 1);
      const double ax = u - x0;
      const int xs[4] = {x0, x1, x0, x1};
      const int ys[4] = {y0, y0, y1, y1};
      const double ws[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
      double acc = 0.0, wsum = 0.0;
      for (int k = 0; k < 4; ++k) {
        if (ws[k] <= 0.0 || !depth.valid(xs[k], ys[k])) continue;
        acc += ws[k] * depth.at(xs[k], ys[k]);
        wsum += ws[k];
      }
      if (wsum > 0.0) out.set(x, y, acc / wsum);
    }
  }
  return out;
}

DepthMetrics depth_metrics(const DepthMap& pred, const DepthMap& gt, const DepthEvalConfig& cfg) {
  cfg.validate();
  const DepthMap p_eval = resize_depth(pred, cfg.eval_width, cfg.eval_height);
  const DepthMap g_eval = resize_depth(gt, cfg.eval_width, cfg.eval_height);

  std::vector<double> p, g;
  for (std::size_t i = 0; i < g_eval.size(); ++i) {
    const double gv = g_eval.values()[i];
    const double pv = p_eval.values()[i];
    if (!g_eval.mask()[i] || !p_eval.mask()[i]) continue;
    if (!(gv >= cfg.depth_min && gv <= cfg.depth_max) || !(pv > 0.0) || !std::isfinite(pv)) {
      continue;
    }
    p.push_back(pv);
    g.push_back(gv);
  }
  if (p.empty()) throw Error(ErrorCode::kEmptySet, "depth_metrics: no valid pixels");

  DepthMetrics m;
  if (cfg.median_scaling) {
    std::vector<double> gs = g, ps = p;
    m.scale = median_in_place(gs) / median_in_place(ps);
    for (double& v : p) v *= m.scale;
  }

  double abs_rel = 0, sq_rel = 0, sq = 0, sq_log = 0, hits = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - g[i];
    abs_rel += std::abs(d) / g[i];
    sq_rel += d * d / g[i];
    sq += d * d;
    const double dl = std::log(p[i]) - std::log(g[i]);
    sq_log += dl * dl;
    // Equivalent to max(p/g, g/p) < 1.25 for positive values, without the
    // rounding of the quotient.
    if (p[i] < 1.25 * g[i] && g[i] < 1.25 * p[i]) hits += 1.0;
  }
  const double n = static_cast<double>(p.size());
  m.abs_rel = abs_rel / n;
  m.sq_rel = sq_rel / n;
  m.rmse = std::sqrt(sq / n);
  m.rmse_log = std::sqrt(sq_log / n);
  m.delta_1_25 = hits / n;
  m.pixels = p.size();
  return m;
}

std::string format_table(const nlohmann::json& metrics) {
  std::string out;
  char buf[256];
  for (const auto& [key, value] : metrics.items()) {
    if (value.is_number_float()) {
      std::snprintf(buf, sizeof(buf), "%-12s %14.6f\n", key.c_str(), value.get<double>());
    } else if (value.is_number()) {
      std::snprintf(buf, sizeof(buf), "%-12s %14lld\n", key.c_str(), value.get<long long>());
    } else {
      continue;
    }
    out += buf;
  }
  return out;
}

}  // namespace endogeo
