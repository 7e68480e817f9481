// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nocsim/engine.hpp"

namespace noc {

// A simulation template plus the axes a sweep runs over.
struct ExperimentConfig {
  SimConfig sim;
  std::vector<double> rates;             // defaults to {traffic.rate}
  std::vector<std::uint64_t> seeds;      // defaults to {seed}
  std::vector<Algorithm> algorithms;     // defaults to {routing.algorithm}
  std::size_t route_budget = kDefaultRouteBudget;
  std::string out_dir = "out";
};

// Flat "dotted.key = value" lines; '#' starts a comment. Relative file
// paths (topology.file, faults.file, traffic.permutation_file) resolve
// against base_dir.
//
// Errors: SyntaxError (line:col), UnknownKey, TypeMismatch,
// MissingRequired (topology.kind, routing.algorithm), ConfigError for
// settings that do not fit together.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Every accepted key, sorted.
std::vector<std::string> config_keys();

std::string read_file(const std::filesystem::path& path);

}  // namespace noc
