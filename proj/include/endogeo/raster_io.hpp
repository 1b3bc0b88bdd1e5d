// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Binary raster formats.
//
// PFM: "Pf" (1 channel) or "PF" (3 channels) magic line, "<width> <height>"
// line, scale line whose sign selects the byte order (negative = little
// endian), then 32-bit floats with rows stored bottom-to-top.
//
// Middlebury .flo: float 202021.25, int32 width, int32 height, then
// interleaved float32 (du, dv) row-major top-to-bottom, little endian.

#pragma once

#include <string>
#include <vector>

#include "endogeo/raster.hpp"

namespace endogeo {

struct PfmImage {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 or 3
  // Row-major top-to-bottom, channel-interleaved.
  std::vector<float> data;
};

std::string encode_pfm(const PfmImage& image, bool little_endian = true);
PfmImage decode_pfm(const std::string& bytes);

PfmImage read_pfm(const std::string& path);
void write_pfm(const std::string& path, const PfmImage& image, bool little_endian = true);

// Masked pixels are stored as 0. With zero_is_invalid, stored zeros and
// non-finite values come back masked; otherwise every finite value is valid.
PfmImage to_pfm(const ScalarRaster& raster);
ScalarRaster scalar_from_pfm(const PfmImage& image, bool zero_is_invalid);

PfmImage to_pfm(const Pointmap& points);
// (0, 0, 0) and non-finite points come back masked.
Pointmap pointmap_from_pfm(const PfmImage& image);

template <typename Tag>
void write_scalar_pfm(const std::string& path, const Raster<double, Tag>& raster) {
  write_pfm(path, to_pfm(raster.template retag<void>()));
}

template <typename Tag = void>
Raster<double, Tag> read_scalar_pfm(const std::string& path, bool zero_is_invalid = true) {
  return scalar_from_pfm(read_pfm(path), zero_is_invalid).template retag<Tag>();
}

inline DepthMap read_depth_pfm(const std::string& path) {
  return read_scalar_pfm<DepthTag>(path, true);
}

inline constexpr float kFloMagic = 202021.25f;
// Components above this magnitude mark unknown flow.
inline constexpr float kFloUnknownThreshold = 1e9f;
inline constexpr float kFloUnknownValue = 1e10f;

std::string encode_flo(const FlowField& flow);
FlowField decode_flo(const std::string& bytes);

FlowField read_flo(const std::string& path);
void write_flo(const std::string& path, const FlowField& flow);

// Whole-file helpers shared by the readers.
std::string read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const std::string& bytes);

}  // namespace endogeo
