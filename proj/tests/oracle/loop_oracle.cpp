// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "loop_oracle.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void quat_to_matrix(const double q[4], double r[3][3]) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  r[0][0] = w * w + x * x - y * y - z * z;
  r[0][1] = 2 * (x * y - w * z);
  r[0][2] = 2 * (x * z + w * y);
  r[1][0] = 2 * (x * y + w * z);
  r[1][1] = w * w - x * x + y * y - z * z;
  r[1][2] = 2 * (y * z - w * x);
  r[2][0] = 2 * (x * z - w * y);
  r[2][1] = 2 * (y * z + w * x);
  r[2][2] = w * w - x * x - y * y + z * z;
}

// Bilinear lookup; false when outside or a contributing neighbor is masked.
bool bilinear(const std::vector<double>& img, const std::vector<int>& mask, int w, int h,
              double u, double v, double* out) {
  if (u < 0 || v < 0 || u > w - 1 || v > h - 1) return false;
  const int x0 = (int)std::floor(u), y0 = (int)std::floor(v);
  const double fx = u - x0, fy = v - y0;
  const int x1 = fx > 0 ? x0 + 1 : x0;
  const int y1 = fy > 0 ? y0 + 1 : y0;
  const int idx[4] = {y0 * w + x0, y0 * w + x1, y1 * w + x0, y1 * w + x1};
  for (int i : idx) {
    if (!mask[i]) return false;
  }
  *out = (1 - fy) * ((1 - fx) * img[idx[0]] + fx * img[idx[1]]) +
         fy * ((1 - fx) * img[idx[2]] + fx * img[idx[3]]);
  return true;
}

}  // namespace

double conf_loss(int w, int h, const std::vector<double>& pred_xyz,
                 const std::vector<int>& pred_mask, const std::vector<double>& ref_xyz,
                 const std::vector<int>& ref_mask, const std::vector<double>& conf,
                 double alpha) {
  const int n = w * h;
  double sp = 0, sr = 0;
  int np = 0, nr = 0;
  for (int i = 0; i < n; ++i) {
    if (pred_mask[i]) {
      sp += std::sqrt(pred_xyz[3 * i] * pred_xyz[3 * i] + pred_xyz[3 * i + 1] * pred_xyz[3 * i + 1] +
                      pred_xyz[3 * i + 2] * pred_xyz[3 * i + 2]);
      ++np;
    }
    if (ref_mask[i]) {
      sr += std::sqrt(ref_xyz[3 * i] * ref_xyz[3 * i] + ref_xyz[3 * i + 1] * ref_xyz[3 * i + 1] +
                      ref_xyz[3 * i + 2] * ref_xyz[3 * i + 2]);
      ++nr;
    }
  }
  const double s_hat = sp / np, s = sr / nr;
  double total = 0;
  for (int i = 0; i < n; ++i) {
    if (!pred_mask[i] || !ref_mask[i]) continue;
    double d2 = 0;
    for (int c = 0; c < 3; ++c) {
      const double d = pred_xyz[3 * i + c] / s_hat - ref_xyz[3 * i + c] / s;
      d2 += d * d;
    }
    total += conf[i] * std::sqrt(d2) - alpha * std::log(conf[i]);
  }
  return total;
}

double pose_loss(int n, const std::vector<double>& pred_q, const std::vector<double>& pred_t,
                 const std::vector<double>& ref_q, const std::vector<double>& ref_t,
                 double s_hat, double s) {
  double total = 0;
  for (int k = 0; k < n; ++k) {
    double minus = 0, plus = 0;
    for (int c = 0; c < 4; ++c) {
      minus += (pred_q[4 * k + c] - ref_q[4 * k + c]) * (pred_q[4 * k + c] - ref_q[4 * k + c]);
      plus += (pred_q[4 * k + c] + ref_q[4 * k + c]) * (pred_q[4 * k + c] + ref_q[4 * k + c]);
    }
    double tt = 0;
    for (int c = 0; c < 3; ++c) {
      const double d = pred_t[3 * k + c] / s_hat - ref_t[3 * k + c] / s;
      tt += d * d;
    }
    total += std::min(std::sqrt(minus), std::sqrt(plus)) + std::sqrt(tt);
  }
  return total;
}

double c_temp(const Cam& ki, const Cam& kj, const std::vector<double>& depth_i,
              const std::vector<int>& mask_i, const std::vector<double>& depth_j,
              const std::vector<int>& mask_j, const double q[4], const double t[3],
              const std::vector<double>& flow_uv, const std::vector<int>& flow_mask) {
  double r[3][3];
  quat_to_matrix(q, r);
  double sum = 0;
  long count = 0;
  for (int y = 0; y < ki.h; ++y) {
    for (int x = 0; x < ki.w; ++x) {
      const int i = y * ki.w + x;
      if (!mask_i[i] || depth_i[i] <= 0 || !flow_mask[i]) continue;
      const double d = depth_i[i];
      const double X[3] = {(x - ki.cx) / ki.fx * d, (y - ki.cy) / ki.fy * d, d};
      const double pz = r[2][0] * X[0] + r[2][1] * X[1] + r[2][2] * X[2] + t[2];
      if (pz <= 0) continue;
      const double u = x + flow_uv[2 * i], v = y + flow_uv[2 * i + 1];
      double dj;
      if (!bilinear(depth_j, mask_j, kj.w, kj.h, u, v, &dj) || dj <= 0) continue;
      sum += std::max(pz / dj, dj / pz) - 1.0;
      ++count;
    }
  }
  return sum / count;
}

Prior c_prior(const Cam& k, const std::vector<double>& depth, const std::vector<int>& mask,
              const std::vector<double>& ref, const std::vector<int>& ref_mask,
              double w_si, double w_grad, double w_normal) {
  const int w = k.w, h = k.h;
  std::vector<double> g(w * h, 0.0);
  std::vector<int> gm(w * h, 0);
  double sum = 0, sum_sq = 0;
  long n = 0;
  for (int i = 0; i < w * h; ++i) {
    if (mask[i] && ref_mask[i] && depth[i] > 0 && ref[i] > 0) {
      g[i] = std::log(depth[i]) - std::log(ref[i]);
      gm[i] = 1;
      sum += g[i];
      sum_sq += g[i] * g[i];
      ++n;
    }
  }
  Prior out{};
  out.si = sum_sq / n - (sum / n) * (sum / n);

  int cw = w, ch = h;
  std::vector<double> cur = g;
  std::vector<int> cm = gm;
  out.grad = 0;
  for (int scale = 0; scale < 4; ++scale) {
    long valid = 0;
    double acc = 0;
    for (int y = 0; y < ch; ++y) {
      for (int x = 0; x < cw; ++x) {
        if (!cm[y * cw + x]) continue;
        ++valid;
        if (x + 1 < cw && cm[y * cw + x + 1]) acc += std::abs(cur[y * cw + x + 1] - cur[y * cw + x]);
        if (y + 1 < ch && cm[(y + 1) * cw + x]) acc += std::abs(cur[(y + 1) * cw + x] - cur[y * cw + x]);
      }
    }
    if (valid > 0) out.grad += acc / valid;
    const int nw = cw / 2, nh = ch / 2;
    std::vector<double> next(nw * nh, 0.0);
    std::vector<int> nm(nw * nh, 0);
    for (int y = 0; y < nh; ++y) {
      for (int x = 0; x < nw; ++x) {
        const int a = (2 * y) * cw + 2 * x, b = a + 1, c = a + cw, d = c + 1;
        if (cm[a] && cm[b] && cm[c] && cm[d]) {
          next[y * nw + x] = (cur[a] + cur[b] + cur[c] + cur[d]) / 4.0;
          nm[y * nw + x] = 1;
        }
      }
    }
    cur = next;
    cm = nm;
    cw = nw;
    ch = nh;
  }

  auto point = [&](const std::vector<double>& z, int x, int y, double p[3]) {
    const double d = z[y * w + x];
    p[0] = (x - k.cx) / k.fx * d;
    p[1] = (y - k.cy) / k.fy * d;
    p[2] = d;
  };
  auto normal = [&](const std::vector<double>& z, int x, int y, double nrm[3]) {
    double l[3], r[3], u[3], b[3];
    point(z, x - 1, y, l);
    point(z, x + 1, y, r);
    point(z, x, y - 1, u);
    point(z, x, y + 1, b);
    const double tx[3] = {r[0] - l[0], r[1] - l[1], r[2] - l[2]};
    const double ty[3] = {b[0] - u[0], b[1] - u[1], b[2] - u[2]};
    nrm[0] = tx[1] * ty[2] - tx[2] * ty[1];
    nrm[1] = tx[2] * ty[0] - tx[0] * ty[2];
    nrm[2] = tx[0] * ty[1] - tx[1] * ty[0];
    const double len = std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]);
    for (int c = 0; c < 3; ++c) nrm[c] /= len;
  };
  double nsum = 0;
  long ncount = 0;
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const int ids[5] = {y * w + x, y * w + x - 1, y * w + x + 1, (y - 1) * w + x, (y + 1) * w + x};
      bool ok = true;
      for (int id : ids) ok = ok && gm[id];
      if (!ok) continue;
      double na[3], nb[3];
      normal(depth, x, y, na);
      normal(ref, x, y, nb);
      nsum += 1.0 - (na[0] * nb[0] + na[1] * nb[1] + na[2] * nb[2]);
      ++ncount;
    }
  }
  out.normal = ncount > 0 ? nsum / ncount : 0.0;
  out.total = w_si * out.si + w_grad * out.grad + w_normal * out.normal;
  return out;
}

DepthMetrics depth_metrics(const std::vector<double>& pred, const std::vector<int>& pred_mask,
                           const std::vector<double>& gt, const std::vector<int>& gt_mask,
                           double depth_min, double depth_max, bool median_scaling) {
  std::vector<double> p, g;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt_mask[i] && gt[i] >= depth_min && gt[i] <= depth_max && pred_mask[i] && pred[i] > 0) {
      p.push_back(pred[i]);
      g.push_back(gt[i]);
    }
  }
  if (median_scaling) {
    const double ratio = median_of(g) / median_of(p);
    for (double& v : p) v *= ratio;
  }
  DepthMetrics m{};
  const double n = (double)p.size();
  double a = 0, s = 0, r = 0, rl = 0, d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    a += std::abs(p[i] - g[i]) / g[i];
    s += (p[i] - g[i]) * (p[i] - g[i]) / g[i];
    r += (p[i] - g[i]) * (p[i] - g[i]);
    rl += (std::log(p[i]) - std::log(g[i])) * (std::log(p[i]) - std::log(g[i]));
    if (std::max(p[i] / g[i], g[i] / p[i]) < 1.25) d += 1;
  }
  m.abs_rel = a / n;
  m.sq_rel = s / n;
  m.rmse = std::sqrt(r / n);
  m.rmse_log = std::sqrt(rl / n);
  m.delta = d / n;
  m.count = (long)p.size();
  return m;
}

}  // namespace oracle
