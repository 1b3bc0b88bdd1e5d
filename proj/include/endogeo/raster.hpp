// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Row-major single- or multi-channel rasters with a per-pixel validity mask.
// Pixel (x, y) has its center at integer coordinates.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "endogeo/error.hpp"
#include "endogeo/geometry.hpp"

namespace endogeo {

template <typename T>
T zero_value() {
  if constexpr (std::is_arithmetic_v<T>) {
    return T{};
  } else {
    return T::Zero();
  }
}

template <typename T, typename Tag = void>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, const T& fill = zero_value<T>(), bool valid = true)
      : width_(width),
        height_(height),
        values_(checked_size(width, height), fill),
        valid_(values_.size(), valid ? 1 : 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  const T& at(int x, int y) const { return values_[index(x, y)]; }
  T& at(int x, int y) { return values_[index(x, y)]; }
  bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }

  void set(int x, int y, const T& v) {
    values_[index(x, y)] = v;
    valid_[index(x, y)] = 1;
  }
  void invalidate(int x, int y) {
    values_[index(x, y)] = T{};
    valid_[index(x, y)] = 0;
  }

  const std::vector<T>& values() const { return values_; }
  std::vector<T>& values() { return values_; }
  const std::vector<std::uint8_t>& mask() const { return valid_; }
  std::vector<std::uint8_t>& mask() { return valid_; }

  std::size_t valid_count() const {
    std::size_t n = 0;
    for (auto v : valid_) n += v != 0;
    return n;
  }

  template <typename OtherTag>
  Raster<T, OtherTag> retag() const {
    Raster<T, OtherTag> out(width_, height_);
    out.values() = values_;
    out.mask() = valid_;
    return out;
  }

  template <typename U, typename OtherTag>
  bool same_shape(const Raster<U, OtherTag>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 0 || height < 0) {
      throw Error(ErrorCode::kDimensionMismatch, "negative raster dimensions");
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
  std::vector<std::uint8_t> valid_;
};

struct DepthTag;
struct DisparityTag;
struct ImageTag;
struct ConfidenceTag;
struct PointTag;
struct FlowTag;
struct CoordinateTag;

using ScalarRaster = Raster<double>;
using DepthMap = Raster<double, DepthTag>;          // mm
using DisparityMap = Raster<double, DisparityTag>;  // px
using ImageRaster = Raster<double, ImageTag>;
using ConfidenceMap = Raster<double, ConfidenceTag>;
using Pointmap = Raster<Vec3, PointTag>;        // mm
using FlowField = Raster<Vec2, FlowTag>;        // (du, dv) px
using CoordinateMap = Raster<Vec2, CoordinateTag>;  // absolute (u, v) px

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": raster sizes differ (" +
                    std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                    " vs " + std::to_string(b.width()) + "x" +
                    std::to_string(b.height()) + ")");
  }
}

/// Bilinear sample at continuous (u, v). Returns nullopt when the point lies
/// outside [0, w-1] x [0, h-1] or any neighbor carrying non-zero weight is
/// invalid. Integer coordinates read the pixel directly.
template <typename T, typename Tag>
std::optional<T> sample_bilinear(const Raster<T, Tag>& r, double u, double v) {
  if (!(u >= 0.0 && v >= 0.0 && u <= r.width() - 1 && v <= r.height() - 1)) {
    return std::nullopt;
  }
  const int x0 = static_cast<int>(std::floor(u));
  const int y0 = static_cast<int>(std::floor(v));
  const double ax = u - x0;
  const double ay = v - y0;
  const int x1 = ax > 0.0 ? x0 + 1 : x0;
  const int y1 = ay > 0.0 ? y0 + 1 : y0;
  if (!r.valid(x0, y0) || !r.valid(x1, y0) || !r.valid(x0, y1) ||
      !r.valid(x1, y1)) {
    return std::nullopt;
  }
  if (ax == 0.0 && ay == 0.0) return r.at(x0, y0);
  const T top = (1.0 - ax) * r.at(x0, y0) + ax * r.at(x1, y0);
  const T bottom = (1.0 - ax) * r.at(x0, y1) + ax * r.at(x1, y1);
  return T((1.0 - ay) * top + ay * bottom);
}

}  // namespace endogeo
