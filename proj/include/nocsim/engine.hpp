// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nocsim/addressing.hpp"
#include "nocsim/fabric.hpp"
#include "nocsim/routing.hpp"
#include "nocsim/topology.hpp"
#include "nocsim/workload.hpp"

namespace noc {

enum class Algorithm { kXy, kDyxy, kGreedy, kGreedyFallback, kNeighborhood, kHierarchical };

std::string to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& name);

struct WirelessConfig {
  bool enabled = false;
  std::vector<NodeId> hubs;
  int threshold = 8;
  int w_cycles = 4;
  int queue_cap = 1;
};

struct SimConfig {
  TopologyParams topology = TopologyParams::mesh(4, 4);
  std::optional<Topology> custom_topology;  // overrides `topology` when set

  Algorithm algorithm = Algorithm::kXy;
  Metric metric = Metric::kEuclidean;
  int anchor_count = 3;
  std::vector<NodeId> anchors;  // explicit anchors win over anchor_count
  std::vector<NodeId> centers;  // empty: two farthest-point centers

  FabricParams fabric;
  bool vc_count_explicit = false;  // otherwise chosen from topology/algorithm

  TrafficSpec traffic;
  std::uint64_t max_packets = 0;  // 0 = unlimited
  FaultSchedule faults;

  WirelessConfig wireless;

  Cycle warmup = 10000;
  Cycle measure = 50000;
  Cycle drain = 20000;
  std::uint64_t seed = 1;

  bool test_mode = false;     // livelock/deadlock throw instead of being reported
  bool debug_checks = false;  // conservation checked every cycle
};

// Topology described by the config.
Topology build_topology(const SimConfig& config);
// VC count after applying the topology/algorithm default.
int effective_vc_count(const SimConfig& config);
// Throws ConfigError on inconsistent settings.
void validate(const SimConfig& config, const Topology& topology);

struct MetricsReport {
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t residual = 0;
  std::uint64_t measured_injected = 0;
  std::uint64_t measured_delivered = 0;
  double avg_latency = 0.0;
  double p99_latency = 0.0;
  double throughput = 0.0;  // measured flits delivered per terminal per cycle
  double offered = 0.0;     // measured flits injected per terminal per cycle
  double utilization = 0.0; // mean over directed links
  std::vector<double> link_utilization;
  double wireless_share = 0.0;
  std::uint64_t livelock = 0;
  bool deadlock = false;
  bool conservation_ok = true;
  int max_transmitters = 0;
  Cycle cycles = 0;
  double wall_seconds = 0.0;  // not serialized

  // key=value lines in a fixed order.
  std::string serialize() const;
};

struct PacketRecord {
  enum class Leg : std::uint8_t { kDirect, kToHub, kOverAir, kFromHub };

  int src_terminal = 0;
  int dst_terminal = 0;
  NodeId src = 0;
  NodeId dst = 0;
  int length = 1;
  Cycle injected = 0;
  Cycle delivered = -1;
  int hops = 0;
  int flits_delivered = 0;
  bool measured = false;
  bool dropped = false;
  bool wireless = false;
  Leg leg = Leg::kDirect;
  NodeId leg_target = 0;
  int src_hub = -1;
  int dst_hub = -1;
  bool follows_route = false;
  bool fallback = false;
  std::size_t route_pos = 0;
  Route route;
};

struct FlitCounts {
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;  // counted by scanning buffers and hub queues
};

class Simulation {
 public:
  explicit Simulation(const SimConfig& config);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Warmup + measurement with injection, then drain until empty or the
  // drain window ends.
  MetricsReport run();

  // Manual stepping, for tests and tools.
  PacketId inject_packet(int src_terminal, int dst_terminal);
  void step(bool with_traffic = false);
  Cycle now() const;
  bool quiescent() const;
  const PacketRecord& packet(PacketId id) const;
  std::size_t packet_count() const;
  const Topology& topology() const;
  const FabricParams& fabric() const;
  int diameter() const;
  FlitCounts flit_counts() const;
  int max_transmitters() const;
  MetricsReport report() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

MetricsReport run(const SimConfig& config);

struct SaturationResult {
  double rate = 0.0;
  bool saturated = false;  // false: never crossed, `rate` is the top of the grid
  double zero_load_latency = 0.0;
  std::vector<double> rates;      // grid points simulated, up to the crossing
  std::vector<double> latencies;
};

inline constexpr double kSaturationMultiplier = 3.0;

// Lowest grid rate whose mean latency exceeds 3x zero-load latency. A run
// that leaves measured packets undelivered after draining counts as over.
SaturationResult measure_saturation(const SimConfig& config, const std::vector<double>& rate_grid);

}  // namespace noc
