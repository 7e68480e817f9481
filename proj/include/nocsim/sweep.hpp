// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nocsim/config.hpp"
#include "nocsim/engine.hpp"

namespace noc {

struct SweepRow {
  Algorithm algorithm = Algorithm::kXy;
  double rate = 0.0;
  std::uint64_t seed = 0;
  MetricsReport report;
};

inline constexpr const char* kSweepHeader =
    "algorithm,rate,seed,delivered,dropped,avg_latency,p99_latency,throughput,utilization,wireless_share";

// One run per (algorithm, rate, seed), sorted by algorithm name, rate,
// seed. Runs are spread over `threads` workers (0 = hardware threads);
// the result does not depend on the thread count.
std::vector<SweepRow> run_sweep_rows(const ExperimentConfig& experiment, unsigned threads = 0);

std::string sweep_csv(const std::vector<SweepRow>& rows);
// Per-(algorithm, rate) means over seeds.
std::string summary_csv(const std::vector<SweepRow>& rows);

// Writes sweep.csv and summary.csv into out_dir. Nothing is left behind
// on failure.
void run_sweep(const ExperimentConfig& experiment, const std::filesystem::path& out_dir, unsigned threads = 0);

}  // namespace noc
