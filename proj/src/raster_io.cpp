// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "endogeo/raster_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "endogeo/error.hpp"

namespace endogeo {

namespace {

constexpr bool kHostLittle = std::endian::native == std::endian::little;

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0x0000ff00u) | ((v << 8) & 0x00ff0000u) | (v << 24);
}

void put_u32(std::string& out, std::uint32_t bits, bool little) {
  if (little != kHostLittle) bits = byteswap32(bits);
  char b[4];
  std::memcpy(b, &bits, 4);
  out.append(b, 4);
}

std::uint32_t get_u32(const std::string& in, std::size_t offset, bool little) {
  std::uint32_t bits;
  std::memcpy(&bits, in.data() + offset, 4);
  if (little != kHostLittle) bits = byteswap32(bits);
  return bits;
}

void put_f32(std::string& out, float v, bool little) {
  put_u32(out, std::bit_cast<std::uint32_t>(v), little);
}

float get_f32(const std::string& in, std::size_t offset, bool little) {
  return std::bit_cast<float>(get_u32(in, offset, little));
}

// Reads one whitespace-delimited token starting at pos; advances pos past it.
std::string next_token(const std::string& bytes, std::size_t& pos) {
  while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return bytes.substr(start, pos - start);
}

int parse_dimension(const std::string& token) {
  if (token.empty() || token.size() > 9 ||
      token.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorCode::kFormat, "bad PFM dimension '" + token + "'");
  }
  return std::stoi(token);
}

}  // namespace

std::string encode_pfm(const PfmImage& image, bool little_endian) {
  if (image.channels != 1 && image.channels != 3) {
    throw Error(ErrorCode::kFormat, "PFM supports 1 or 3 channels");
  }
  const std::size_t expected = static_cast<std::size_t>(image.width) *
                               static_cast<std::size_t>(image.height) *
                               static_cast<std::size_t>(image.channels);
  if (image.data.size() != expected) {
    throw Error(ErrorCode::kDimensionMismatch, "PFM payload size does not match header");
  }
  std::string out = image.channels == 1 ? "Pf\n" : "PF\n";
  out += std::to_string(image.width) + " " + std::to_string(image.height) + "\n";
  out += little_endian ? "-1.0\n" : "1.0\n";
  out.reserve(out.size() + expected * 4);
  const std::size_t row = static_cast<std::size_t>(image.width) * image.channels;
  for (int y = image.height - 1; y >= 0; --y) {
    const float* src = image.data.data() + static_cast<std::size_t>(y) * row;
    for (std::size_t i = 0; i < row; ++i) put_f32(out, src[i], little_endian);
  }
  return out;
}

PfmImage decode_pfm(const std::string& bytes) {
  std::size_t pos = 0;
  const std::string magic = next_token(bytes, pos);
  PfmImage image;
  if (magic == "Pf") {
    image.channels = 1;
  } else if (magic == "PF") {
    image.channels = 3;
  } else {
    throw Error(ErrorCode::kFormat, "not a PFM file (magic '" + magic + "')");
  }
  image.width = parse_dimension(next_token(bytes, pos));
  image.height = parse_dimension(next_token(bytes, pos));
  const std::string scale_token = next_token(bytes, pos);
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(scale_token, &used);
    if (used != scale_token.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorCode::kFormat, "bad PFM scale '" + scale_token + "'");
  }
  if (scale == 0.0 || !std::isfinite(scale)) {
    throw Error(ErrorCode::kFormat, "PFM scale must be non-zero");
  }
  const bool little = scale < 0.0;
  // Exactly one whitespace byte separates the header from the payload.
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw Error(ErrorCode::kFormat, "truncated PFM header");
  }
  ++pos;

  const std::size_t row = static_cast<std::size_t>(image.width) * image.channels;
  const std::size_t count = row * static_cast<std::size_t>(image.height);
  if (bytes.size() - pos != count * 4) {
    throw Error(ErrorCode::kFormat, "PFM payload has " + std::to_string(bytes.size() - pos) +
                                        " bytes, expected " + std::to_string(count * 4));
  }
  image.data.resize(count);
  for (int y = image.height - 1; y >= 0; --y) {
    float* dst = image.data.data() + static_cast<std::size_t>(y) * row;
    for (std::size_t i = 0; i < row; ++i, pos += 4) dst[i] = get_f32(bytes, pos, little);
  }
  return image;
}

std::string read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_binary_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

PfmImage read_pfm(const std::string& path) {
  try {
    return decode_pfm(read_binary_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_pfm(const std::string& path, const PfmImage& image, bool little_endian) {
  write_binary_file(path, encode_pfm(image, little_endian));
}

PfmImage to_pfm(const ScalarRaster& raster) {
  PfmImage image{raster.width(), raster.height(), 1, {}};
  image.data.resize(raster.size());
  for (std::size_t i = 0; i < raster.size(); ++i) {
    image.data[i] = raster.mask()[i] ? static_cast<float>(raster.values()[i]) : 0.0f;
  }
  return image;
}

ScalarRaster scalar_from_pfm(const PfmImage& image, bool zero_is_invalid) {
  if (image.channels != 1) {
    throw Error(ErrorCode::kFormat, "expected a single-channel PFM");
  }
  ScalarRaster r(image.width, image.height, 0.0, false);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const float v = image.data[r.index(x, y)];
      if (!std::isfinite(v) || (zero_is_invalid && v == 0.0f)) continue;
      r.set(x, y, static_cast<double>(v));
    }
  }
  return r;
}

PfmImage to_pfm(const Pointmap& points) {
  PfmImage image{points.width(), points.height(), 3, {}};
  image.data.resize(points.size() * 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 p = points.mask()[i] ? points.values()[i] : Vec3::Zero();
    for (int c = 0; c < 3; ++c) image.data[3 * i + c] = static_cast<float>(p[c]);
  }
  return image;
}

Pointmap pointmap_from_pfm(const PfmImage& image) {
  if (image.channels != 3) {
    throw Error(ErrorCode::kFormat, "expected a 3-channel PFM pointmap");
  }
  Pointmap r(image.width, image.height, Vec3::Zero(), false);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::size_t i = r.index(x, y);
      const Vec3 p(image.data[3 * i], image.data[3 * i + 1], image.data[3 * i + 2]);
      if (!p.allFinite() || p.isZero(0.0)) continue;
      r.set(x, y, p);
    }
  }
  return r;
}

std::string encode_flo(const FlowField& flow) {
  std::string out;
  out.reserve(12 + flow.size() * 8);
  put_f32(out, kFloMagic, true);
  put_u32(out, static_cast<std::uint32_t>(flow.width()), true);
  put_u32(out, static_cast<std::uint32_t>(flow.height()), true);
  for (std::size_t i = 0; i < flow.size(); ++i) {
    if (flow.mask()[i]) {
      put_f32(out, static_cast<float>(flow.values()[i].x()), true);
      put_f32(out, static_cast<float>(flow.values()[i].y()), true);
    } else {
      put_f32(out, kFloUnknownValue, true);
      put_f32(out, kFloUnknownValue, true);
    }
  }
  return out;
}

FlowField decode_flo(const std::string& bytes) {
  if (bytes.size() < 12) throw Error(ErrorCode::kFormat, "truncated .flo header");
  if (get_f32(bytes, 0, true) != kFloMagic) {
    throw Error(ErrorCode::kFormat, "bad .flo magic number");
  }
  const auto w = static_cast<std::int32_t>(get_u32(bytes, 4, true));
  const auto h = static_cast<std::int32_t>(get_u32(bytes, 8, true));
  if (w < 0 || h < 0 || w > (1 << 20) || h > (1 << 20)) {
    throw Error(ErrorCode::kFormat, "bad .flo dimensions");
  }
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() != 12 + count * 8) {
    throw Error(ErrorCode::kFormat, ".flo payload size does not match header");
  }
  FlowField flow(w, h, Vec2::Zero(), false);
  for (std::size_t i = 0; i < count; ++i) {
    const float du = get_f32(bytes, 12 + 8 * i, true);
    const float dv = get_f32(bytes, 16 + 8 * i, true);
    if (!std::isfinite(du) || !std::isfinite(dv) || std::abs(du) > kFloUnknownThreshold ||
        std::abs(dv) > kFloUnknownThreshold) {
      continue;
    }
    flow.values()[i] = Vec2(du, dv);
    flow.mask()[i] = 1;
  }
  return flow;
}

FlowField read_flo(const std::string& path) {
  try {
    return decode_flo(read_binary_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_flo(const std::string& path, const FlowField& flow) {
  write_binary_file(path, encode_flo(flow));
}

}  // namespace endogeo
