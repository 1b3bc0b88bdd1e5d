// Copyright 2026 The endogeo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Each subcommand owns a flat parameter set that can
// be loaded from a JSON config file and overridden by flags.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "endogeo/geometry.hpp"

namespace endogeo::cli {

enum class ParamType { kInt, kFloat, kBool, kString, kVec3 };

struct ParamSpec {
  std::string key;               // config key; the flag is --key with '_' -> '-'
  ParamType type = ParamType::kFloat;
  nlohmann::json default_value;  // null marks a required parameter
  std::string help;
};

class ParamSet {
 public:
  explicit ParamSet(std::vector<ParamSpec> specs);

  /// Merges a JSON object. Unknown keys and wrongly typed values throw kConfig.
  void merge_json(const nlohmann::json& object);
  void merge_file(const std::string& path);
  /// Parses a flag value according to the parameter type.
  void set_from_text(const std::string& key, const std::string& text);
  /// Throws kConfig naming the first parameter that is still unset.
  void require_complete() const;

  const std::vector<ParamSpec>& specs() const { return specs_; }
  nlohmann::json echo() const { return values_; }

  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::string string(const std::string& key) const;
  Vec3 vec3(const std::string& key) const;

 private:
  const ParamSpec& spec(const std::string& key) const;

  std::vector<ParamSpec> specs_;
  nlohmann::json values_;
};

std::string flag_name(const std::string& key);

/// Runs one command line (without the program name). Data goes to `out`
/// or files, logs and errors to `err`. Returns the process exit code:
/// 0 success, 2 input/format error, 3 validation error, 4 numeric failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace endogeo::cli
