// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nocsim/fabric.hpp"
#include "nocsim/topology.hpp"

namespace noc {

enum class TrafficPattern { kUniformRandom, kTranspose, kHotspot, kPermutationFile };

std::string to_string(TrafficPattern p);
std::optional<TrafficPattern> parse_traffic_pattern(const std::string& name);

struct TrafficSpec {
  TrafficPattern pattern = TrafficPattern::kUniformRandom;
  double injection_rate = 0.0;  // flits per terminal per cycle
  int hotspot = 0;
  double hotspot_fraction = 0.0;
  int packet_length = 4;
  std::uint64_t seed = 1;
  std::vector<int> permutation;  // destination terminal per source, -1 for none
};

// Where traffic can go: terminal count, grid shape for transpose, and
// which terminals are currently alive.
struct TrafficContext {
  int terminals = 0;
  int grid_width = 0;
  int grid_height = 0;
  std::function<bool(int)> alive;
};

struct PacketDescriptor {
  int src = 0;
  int dst = 0;
};

// Counter-based stream: every draw is a pure function of
// (seed, terminal, cycle, draw index), so results do not depend on the
// order terminals are evaluated in.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
      : key_(mix(mix(mix(seed) ^ stream) ^ counter)) {}

  std::uint64_t next_u64() { return mix(key_ ^ (0x9e3779b97f4a7c15ULL * ++draw_)); }
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  int next_below(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t key_;
  std::uint64_t draw_ = 0;
};

// At most one packet per terminal per cycle, with probability
// rate / packet_length.
std::optional<PacketDescriptor> inject(const TrafficSpec& spec, const TrafficContext& ctx, int terminal, Cycle cycle);

// Destination-only part of inject(), exposed for pattern tests.
std::optional<int> pick_destination(const TrafficSpec& spec, const TrafficContext& ctx, int terminal, CounterRng& rng);

// "src dst" per line; '#' starts a comment.
std::vector<int> parse_permutation(const std::string& text, int terminals);

struct FaultEvent {
  enum class Element { kNode, kLink };
  Element element = Element::kNode;
  NodeId node = -1;
  LinkId link = -1;  // directed link for kLink
  Cycle down = 0;
  std::optional<Cycle> up;  // nullopt = permanent

  bool operator==(const FaultEvent&) const = default;
};

struct FaultSchedule {
  std::vector<FaultEvent> events;
};

struct FaultSet {
  std::vector<NodeId> nodes;
  std::vector<LinkId> links;

  bool operator==(const FaultSet&) const = default;
};

// Element down iff down <= cycle < up; a down node takes its links with it.
FaultSet faults_at(const FaultSchedule& schedule, const Topology& topology, Cycle cycle);

// Cycles at which faults_at can change, ascending.
std::vector<Cycle> fault_change_points(const FaultSchedule& schedule);

// "node <id> <down> <up|inf>" or "link <u> <v> <down> <up|inf>" per line.
// Errors carry line:column.
FaultSchedule parse_fault_schedule(const std::string& text, const Topology& topology);

}  // namespace noc
