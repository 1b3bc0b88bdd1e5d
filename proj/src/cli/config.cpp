// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <sstream>

#include "endogeo/cli.hpp"
#include "endogeo/error.hpp"
#include "endogeo/raster_io.hpp"

namespace endogeo::cli {

namespace {

bool matches_type(const nlohmann::json& v, ParamType type) {
  switch (type) {
    case ParamType::kInt: return v.is_number_integer();
    case ParamType::kFloat: return v.is_number();
    case ParamType::kBool: return v.is_boolean();
    case ParamType::kString: return v.is_string();
    case ParamType::kVec3:
      return v.is_array() && v.size() == 3 &&
             std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_number(); });
  }
  return false;
}

const char* type_name(ParamType type) {
  switch (type) {
    case ParamType::kInt: return "an integer";
    case ParamType::kFloat: return "a number";
    case ParamType::kBool: return "a boolean";
    case ParamType::kString: return "a string";
    case ParamType::kVec3: return "three numbers";
  }
  return "a value";
}

std::optional<double> parse_double(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string flag_name(const std::string& key) {
  std::string out = "--" + key;
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

ParamSet::ParamSet(std::vector<ParamSpec> specs)
    : specs_(std::move(specs)), values_(nlohmann::json::object()) {
  for (const auto& s : specs_) values_[s.key] = s.default_value;
}

const ParamSpec& ParamSet::spec(const std::string& key) const {
  for (const auto& s : specs_) {
    if (s.key == key) return s;
  }
  throw Error(ErrorCode::kConfig, "unknown configuration key '" + key + "'");
}

void ParamSet::merge_json(const nlohmann::json& object) {
  if (!object.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
  for (const auto& [key, value] : object.items()) {
    const ParamSpec& s = spec(key);
    if (!matches_type(value, s.type)) {
      throw Error(ErrorCode::kConfig,
                  "config key '" + key + "' must be " + type_name(s.type));
    }
    values_[key] = s.type == ParamType::kFloat ? nlohmann::json(value.get<double>()) : value;
  }
}

void ParamSet::merge_file(const std::string& path) {
  const std::string text = read_binary_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, "config " + path + ": " + e.what());
  }
  merge_json(j);
}

void ParamSet::set_from_text(const std::string& key, const std::string& text) {
  const ParamSpec& s = spec(key);
  const auto bad = [&]() {
    return Error(ErrorCode::kConfig, flag_name(key) + " expects " + type_name(s.type) +
                                         ", got '" + text + "'");
  };
  switch (s.type) {
    case ParamType::kInt: {
      long long v = 0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || ptr != text.data() + text.size()) throw bad();
      values_[key] = v;
      break;
    }
    case ParamType::kFloat: {
      const auto v = parse_double(text);
      if (!v) throw bad();
      values_[key] = *v;
      break;
    }
    case ParamType::kBool: {
      if (text == "true" || text == "on" || text == "1") {
        values_[key] = true;
      } else if (text == "false" || text == "off" || text == "0") {
        values_[key] = false;
      } else {
        throw bad();
      }
      break;
    }
    case ParamType::kString:
      values_[key] = text;
      break;
    case ParamType::kVec3: {
      std::stringstream ss(text);
      std::string part;
      nlohmann::json arr = nlohmann::json::array();
      while (std::getline(ss, part, ',')) {
        const auto v = parse_double(part);
        if (!v) throw bad();
        arr.push_back(*v);
      }
      if (arr.size() != 3) throw bad();
      values_[key] = arr;
      break;
    }
  }
}

void ParamSet::require_complete() const {
  for (const auto& s : specs_) {
    if (values_.at(s.key).is_null()) {
      throw Error(ErrorCode::kConfig, "missing required parameter " + flag_name(s.key));
    }
  }
}

double ParamSet::number(const std::string& key) const {
  spec(key);
  return values_.at(key).get<double>();
}

long long ParamSet::integer(const std::string& key) const {
  spec(key);
  return values_.at(key).get<long long>();
}

bool ParamSet::boolean(const std::string& key) const {
  spec(key);
  return values_.at(key).get<bool>();
}

std::string ParamSet::string(const std::string& key) const {
  spec(key);
  return values_.at(key).get<std::string>();
}

Vec3 ParamSet::vec3(const std::string& key) const {
  spec(key);
  const auto& v = values_.at(key);
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

}  // namespace endogeo::cli
