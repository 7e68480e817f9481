// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

#include "nocsim/error.hpp"

namespace noc {

namespace {

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::vector<SweepRow> run_sweep_rows(const ExperimentConfig& x, unsigned threads) {
  if (x.rates.empty() || x.seeds.empty() || x.algorithms.empty())
    throw Error(ErrorCode::kConfigError, "sweep axes must be non-empty");
  std::vector<SweepRow> rows;
  for (Algorithm a : x.algorithms)
    for (double r : x.rates)
      for (std::uint64_t s : x.seeds) rows.push_back(SweepRow{a, r, s, {}});
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    const std::string na = to_string(a.algorithm);
    const std::string nb = to_string(b.algorithm);
    if (na != nb) return na < nb;
    if (a.rate != b.rate) return a.rate < b.rate;
    return a.seed < b.seed;
  });

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(rows.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(rows.size());
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        SimConfig c = x.sim;
        c.algorithm = rows[i].algorithm;
        c.traffic.injection_rate = rows[i].rate;
        c.seed = rows[i].seed;
        rows[i].report = run(c);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepHeader) + "\n";
  for (const SweepRow& r : rows) {
    const MetricsReport& m = r.report;
    out += to_string(r.algorithm) + "," + real(r.rate) + "," + std::to_string(r.seed) + "," +
           std::to_string(m.delivered) + "," + std::to_string(m.dropped) + "," + real(m.avg_latency) + "," +
           real(m.p99_latency) + "," + real(m.throughput) + "," + real(m.utilization) + "," +
           real(m.wireless_share) + "\n";
  }
  return out;
}

std::string summary_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "algorithm,rate,seeds,delivered,dropped,avg_latency,p99_latency,throughput,utilization,wireless_share\n";
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    double delivered = 0, dropped = 0, lat = 0, p99 = 0, thr = 0, util = 0, share = 0;
    while (j < rows.size() && rows[j].algorithm == rows[i].algorithm && rows[j].rate == rows[i].rate) {
      const MetricsReport& m = rows[j].report;
      delivered += static_cast<double>(m.delivered);
      dropped += static_cast<double>(m.dropped);
      lat += m.avg_latency;
      p99 += m.p99_latency;
      thr += m.throughput;
      util += m.utilization;
      share += m.wireless_share;
      ++j;
    }
    const double n = static_cast<double>(j - i);
    out += to_string(rows[i].algorithm) + "," + real(rows[i].rate) + "," + std::to_string(j - i) + "," +
           real(delivered / n) + "," + real(dropped / n) + "," + real(lat / n) + "," + real(p99 / n) + "," +
           real(thr / n) + "," + real(util / n) + "," + real(share / n) + "\n";
    i = j;
  }
  return out;
}

void run_sweep(const ExperimentConfig& x, const std::filesystem::path& out_dir, unsigned threads) {
  const auto sweep = out_dir / "sweep.csv";
  const auto summary = out_dir / "summary.csv";
  try {
    std::filesystem::create_directories(out_dir);
    auto rows = run_sweep_rows(x, threads);
    write_atomically(sweep, sweep_csv(rows));
    write_atomically(summary, summary_csv(rows));
  } catch (...) {
    std::error_code ec;
    for (const auto& p : {sweep, summary}) {
      std::filesystem::remove(p, ec);
      auto tmp = p;
      tmp += ".tmp";
      std::filesystem::remove(tmp, ec);
    }
    throw;
  }
}

}  // namespace noc
