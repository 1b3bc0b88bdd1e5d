// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "endogeo/losses.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "endogeo/error.hpp"

namespace endogeo {

namespace {

void require_intrinsics_shape(const DepthMap& depth, const CameraIntrinsics& k,
                              const char* what) {
  if (depth.width() != k.width || depth.height() != k.height) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": depth raster does not match camera image size");
  }
}

bool usable_depth(const DepthMap& d, int x, int y) {
  return d.valid(x, y) && d.at(x, y) > 0.0 && std::isfinite(d.at(x, y));
}

void require_weight(double w, const char* name) {
  if (!std::isfinite(w) || w < 0.0) {
    throw Error(ErrorCode::kConfig, std::string(name) + " must be finite and >= 0");
  }
}

PixelLoss mean_of(ScalarRaster per_pixel, double sum, std::size_t count, const char* what) {
  if (count == 0) {
    throw Error(ErrorCode::kEmptySet, std::string(what) + ": no valid pixels");
  }
  return {sum / static_cast<double>(count), std::move(per_pixel), count};
}

}  // namespace

void LossConfig::validate() const {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw Error(ErrorCode::kConfig, "alpha must be > 0");
  }
  require_weight(lambda_consist, "lambda_consist");
  require_weight(w_flow, "w_flow");
  require_weight(w_temp, "w_temp");
  require_weight(w_prior, "w_prior");
  require_weight(w_si, "w_si");
  require_weight(w_grad, "w_grad");
  require_weight(w_normal, "w_normal");
  require_weight(uncertainty_constant, "uncertainty_constant");
}

void NormalizationSpec::validate() const {
  if (!(s_hat > 0.0) || !(s > 0.0) || !std::isfinite(s_hat) || !std::isfinite(s)) {
    throw Error(ErrorCode::kDomain, "scale normalizers must be positive");
  }
}

double point_set_scale(const Pointmap& points) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points.mask()[i]) continue;
    sum += points.values()[i].norm();
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::kEmptySet, "point_set_scale: no valid points");
  return sum / static_cast<double>(n);
}

PixelLoss conf_loss(const Pointmap& pred, const Pointmap& ref, const ConfidenceMap& conf,
                    const LossConfig& cfg) {
  cfg.validate();
  require_same_shape(pred, ref, "conf_loss");
  require_same_shape(pred, conf, "conf_loss");
  const double s_hat = point_set_scale(pred);
  const double s = point_set_scale(ref);

  PixelLoss out{0.0, ScalarRaster(pred.width(), pred.height(), 0.0, false), 0};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred.mask()[i] || !ref.mask()[i]) continue;
    const double c = conf.values()[i];
    if (!conf.mask()[i] || !(c > 0.0) || !std::isfinite(c)) {
      throw Error(ErrorCode::kDomain, "conf_loss: confidences must be positive");
    }
    const double residual = (pred.values()[i] / s_hat - ref.values()[i] / s).norm();
    const double term = c * residual - cfg.alpha * std::log(c);
    out.per_pixel.values()[i] = term;
    out.per_pixel.mask()[i] = 1;
    out.value += term;
    ++out.count;
  }
  if (out.count == 0) {
    throw Error(ErrorCode::kEmptySet, "conf_loss: no jointly valid pixels");
  }
  return out;
}

double pose_loss(std::span<const Pose> pred, std::span<const Pose> ref,
                 const NormalizationSpec& norms) {
  norms.validate();
  if (pred.size() != ref.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "pose_loss: sequences differ in length");
  }
  if (pred.empty()) throw Error(ErrorCode::kEmptySet, "pose_loss: empty sequences");
  double total = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    const Eigen::Vector4d qp = pred[t].rotation.coeffs();
    const Eigen::Vector4d qr = ref[t].rotation.coeffs();
    const double q_term = std::min((qp - qr).norm(), (qp + qr).norm());
    const double t_term =
        (pred[t].translation / norms.s_hat - ref[t].translation / norms.s).norm();
    total += q_term + t_term;
  }
  return total;
}

CoordinateMap induced_reprojection(const DepthMap& depth_i, const CameraIntrinsics& k_i,
                                   const CameraIntrinsics& k_j, const Pose& g_ij) {
  require_intrinsics_shape(depth_i, k_i, "induced_reprojection");
  CoordinateMap out(depth_i.width(), depth_i.height(), Vec2::Zero(), false);
  for (int y = 0; y < depth_i.height(); ++y) {
    for (int x = 0; x < depth_i.width(); ++x) {
      if (!usable_depth(depth_i, x, y)) continue;
      const Vec3 p = g_ij.apply(unproject(Vec2(x, y), depth_i.at(x, y), k_i));
      if (!(p.z() > 0.0)) continue;
      out.set(x, y, project(p, k_j));
    }
  }
  return out;
}

PixelLoss c_flow(const DepthMap& depth_i, const CameraIntrinsics& k_i,
                 const CameraIntrinsics& k_j, const Pose& g_ij, const FlowField& flow) {
  require_same_shape(depth_i, flow, "c_flow");
  const CoordinateMap target = induced_reprojection(depth_i, k_i, k_j, g_ij);
  ScalarRaster per_pixel(depth_i.width(), depth_i.height(), 0.0, false);
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < depth_i.height(); ++y) {
    for (int x = 0; x < depth_i.width(); ++x) {
      if (!target.valid(x, y) || !flow.valid(x, y)) continue;
      const Vec2& u = target.at(x, y);
      const Vec2 p_prime = Vec2(x, y) + flow.at(x, y);
      if (!k_j.contains(u) || !k_j.contains(p_prime)) continue;
      const double l1 = (u - p_prime).cwiseAbs().sum();
      per_pixel.set(x, y, l1);
      sum += l1;
      ++count;
    }
  }
  return mean_of(std::move(per_pixel), sum, count, "c_flow");
}

PixelLoss c_temp(const DepthMap& depth_i, const DepthMap& depth_j,
                 const CameraIntrinsics& k_i, const CameraIntrinsics& k_j,
                 const Pose& g_ij, const FlowField& flow) {
  require_intrinsics_shape(depth_i, k_i, "c_temp");
  require_intrinsics_shape(depth_j, k_j, "c_temp");
  require_same_shape(depth_i, flow, "c_temp");
  ScalarRaster per_pixel(depth_i.width(), depth_i.height(), 0.0, false);
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < depth_i.height(); ++y) {
    for (int x = 0; x < depth_i.width(); ++x) {
      if (!usable_depth(depth_i, x, y) || !flow.valid(x, y)) continue;
      const double pz = g_ij.apply(unproject(Vec2(x, y), depth_i.at(x, y), k_i)).z();
      if (!(pz > 0.0)) continue;
      const Vec2 p_prime = Vec2(x, y) + flow.at(x, y);
      const std::optional<double> dj = sample_bilinear(depth_j, p_prime.x(), p_prime.y());
      if (!dj || !(*dj > 0.0)) continue;
      const double ratio = pz / *dj;
      const double term = std::abs(std::max(ratio, 1.0 / ratio) - 1.0);
      per_pixel.set(x, y, term);
      sum += term;
      ++count;
    }
  }
  return mean_of(std::move(per_pixel), sum, count, "c_temp");
}

namespace {

double gradient_term(const ScalarRaster& g) {
  std::size_t valid = 0;
  double acc = 0.0;
  for (int y = 0; y < g.height(); ++y) {
    for (int x = 0; x < g.width(); ++x) {
      if (!g.valid(x, y)) continue;
      ++valid;
      if (x + 1 < g.width() && g.valid(x + 1, y)) acc += std::abs(g.at(x + 1, y) - g.at(x, y));
      if (y + 1 < g.height() && g.valid(x, y + 1)) acc += std::abs(g.at(x, y + 1) - g.at(x, y));
    }
  }
  return valid > 0 ? acc / static_cast<double>(valid) : 0.0;
}

ScalarRaster average_pool(const ScalarRaster& g) {
  ScalarRaster out(g.width() / 2, g.height() / 2, 0.0, false);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const int sx = 2 * x, sy = 2 * y;
      if (!g.valid(sx, sy) || !g.valid(sx + 1, sy) || !g.valid(sx, sy + 1) ||
          !g.valid(sx + 1, sy + 1)) {
        continue;
      }
      out.set(x, y, (g.at(sx, sy) + g.at(sx + 1, sy) + g.at(sx, sy + 1) + g.at(sx + 1, sy + 1)) / 4.0);
    }
  }
  return out;
}

double dot3(const Vec3& a, const Vec3& b) {
  return a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
}

std::optional<Vec3> surface_normal(const DepthMap& d, const CameraIntrinsics& k, int x, int y) {
  const auto point = [&](int u, int v) { return unproject(Vec2(u, v), d.at(u, v), k); };
  const Vec3 tx = point(x + 1, y) - point(x - 1, y);
  const Vec3 ty = point(x, y + 1) - point(x, y - 1);
  const Vec3 n = tx.cross(ty);
  const double len_sq = dot3(n, n);
  if (!(len_sq > 0.0) || !std::isfinite(len_sq)) return std::nullopt;
  return n;
}

// Cosine of unnormalized vectors; exactly 1 for identical inputs.
double cosine(const Vec3& a, const Vec3& b) {
  return std::min(1.0, dot3(a, b) / std::sqrt(dot3(a, a) * dot3(b, b)));
}

}  // namespace

PriorBreakdown c_prior(const DepthMap& depth, const DepthMap& reference,
                       const CameraIntrinsics& k, const LossConfig& cfg) {
  cfg.validate();
  require_same_shape(depth, reference, "c_prior");
  require_intrinsics_shape(depth, k, "c_prior");

  ScalarRaster g(depth.width(), depth.height(), 0.0, false);
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      if (!usable_depth(depth, x, y) || !usable_depth(reference, x, y)) continue;
      const double v = std::log(depth.at(x, y)) - std::log(reference.at(x, y));
      g.set(x, y, v);
      sum += v;
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorCode::kEmptySet, "c_prior: no jointly valid pixels");

  PriorBreakdown out;
  out.count = n;
  const double mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.mask()[i]) var += (g.values()[i] - mean) * (g.values()[i] - mean);
  }
  out.c_si = var / static_cast<double>(n);

  ScalarRaster level = g;
  for (int scale = 0; scale < 4; ++scale) {
    out.c_grad += gradient_term(level);
    level = average_pool(level);
  }

  double normal_sum = 0.0;
  std::size_t normal_count = 0;
  for (int y = 1; y + 1 < depth.height(); ++y) {
    for (int x = 1; x + 1 < depth.width(); ++x) {
      if (!g.valid(x, y) || !g.valid(x - 1, y) || !g.valid(x + 1, y) || !g.valid(x, y - 1) ||
          !g.valid(x, y + 1)) {
        continue;
      }
      const auto a = surface_normal(depth, k, x, y);
      const auto b = surface_normal(reference, k, x, y);
      if (!a || !b) continue;
      normal_sum += 1.0 - cosine(*a, *b);
      ++normal_count;
    }
  }
  out.c_normal = normal_count > 0 ? normal_sum / static_cast<double>(normal_count) : 0.0;
  out.total = cfg.w_si * out.c_si + cfg.w_grad * out.c_grad + cfg.w_normal * out.c_normal;
  return out;
}

ConsistencyBreakdown consistency_total(const ConsistencyTerms& terms, const LossConfig& cfg) {
  cfg.validate();
  ConsistencyBreakdown out;
  out.terms = terms;
  out.weighted_flow = cfg.w_flow * cfg.uncertainty_constant * terms.c_flow;
  out.weighted_temp = cfg.w_temp * cfg.uncertainty_constant * terms.c_temp;
  out.weighted_prior = cfg.w_prior * terms.c_prior;
  out.total = out.weighted_flow + out.weighted_temp + out.weighted_prior;
  return out;
}

ConsistencyEvaluation evaluate_consistency(const ConsistencyInputs& in, const LossConfig& cfg) {
  cfg.validate();
  ConsistencyEvaluation out;
  ConsistencyTerms terms;
  if (cfg.w_flow > 0.0) {
    const PixelLoss f = c_flow(in.depth_i, in.k_i, in.k_j, in.g_ij, in.flow_ij);
    terms.c_flow = f.value;
    out.flow_pixels = f.count;
  }
  if (cfg.w_temp > 0.0) {
    const PixelLoss t = c_temp(in.depth_i, in.depth_j, in.k_i, in.k_j, in.g_ij, in.flow_ij);
    terms.c_temp = t.value;
    out.temp_pixels = t.count;
  }
  if (cfg.w_prior > 0.0 && in.prior_reference != nullptr) {
    out.prior = c_prior(in.depth_i, *in.prior_reference, in.k_i, cfg);
    terms.c_prior = out.prior.total;
  }
  out.breakdown = consistency_total(terms, cfg);
  return out;
}

double total_loss(double conf, double pose, double consistency, const LossConfig& cfg) {
  cfg.validate();
  return (conf + pose) + cfg.lambda_consist * consistency;
}

}  // namespace endogeo
