// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nocsim/addressing.hpp"
#include "nocsim/topology.hpp"

namespace noc {

// Node ids from source to destination inclusive; {src} when src == dst.
using Route = std::vector<NodeId>;

struct RoutingDecision {
  enum class Kind { kForward, kArrived, kLocalMinimum, kNoRoute, kCoordinateAliasing };
  Kind kind = Kind::kNoRoute;
  int port = -1;

  static RoutingDecision forward(int port) { return {Kind::kForward, port}; }
  static RoutingDecision arrived() { return {Kind::kArrived, -1}; }
  static RoutingDecision local_minimum() { return {Kind::kLocalMinimum, -1}; }
  static RoutingDecision no_route() { return {Kind::kNoRoute, -1}; }
  static RoutingDecision aliasing() { return {Kind::kCoordinateAliasing, -1}; }

  bool operator==(const RoutingDecision&) const = default;
};

std::string to_string(RoutingDecision::Kind kind);

inline constexpr std::size_t kDefaultRouteBudget = 4096;

// True if every consecutive pair is an alive link and no node repeats.
bool is_valid_route(const TopologyView& view, const Route& route);

// ---------------------------------------------------------------------------
// Dimension-order routing (mesh and torus)
// ---------------------------------------------------------------------------

// Output port for the next XY hop, -1 when cur == dst. On a torus each
// dimension takes the shorter way around, the positive way on ties.
int xy_port(const Topology& topology, NodeId cur, NodeId dst);
Route route_xy(const Topology& topology, NodeId src, NodeId dst);
// Wrap-aware Manhattan distance.
int grid_distance(const Topology& topology, NodeId a, NodeId b);

// DyXY: among the minimal X/Y directions pick the neighbor with strictly
// lower occupancy, X on ties. occupancy_by_port[p] is the buffered-flit
// count of the neighbor behind port p. Mesh only.
RoutingDecision next_hop_dyxy(const TopologyView& view, NodeId cur, NodeId dst,
                              std::span<const int> occupancy_by_port);
RoutingDecision next_hop_dyxy(const Topology& topology, NodeId cur, NodeId dst,
                              std::span<const int> occupancy_by_port);
// Minimal directions toward dst in X-then-Y order (at most two ports).
std::vector<int> minimal_grid_ports(const Topology& topology, NodeId cur, NodeId dst);

// ---------------------------------------------------------------------------
// Self-organizing routing
// ---------------------------------------------------------------------------

RoutingDecision next_hop_greedy(const CoordinateMap& coords, Metric metric, const TopologyView& view,
                                NodeId cur, NodeId dst);

// Stage one of the neighborhood method: hop labels from src.
std::vector<int> neighborhood_labels(const TopologyView& view, NodeId src);

// All shortest routes src->dst, built backward from dst through neighbors
// whose label is one less, lower ids first. Throws Unreachable and
// BudgetExceeded.
std::vector<Route> neighborhood_routes(const TopologyView& view, NodeId src, NodeId dst,
                                       std::size_t budget = kDefaultRouteBudget);

// The first route neighborhood_routes would emit, without enumerating the
// rest. `labels` must come from neighborhood_labels(view, src).
Route first_neighborhood_route(const TopologyView& view, const std::vector<int>& labels, NodeId dst);

// Stage-one labels keyed by (fault epoch, source). Readers share the lock;
// a miss computes and inserts under an exclusive lock.
class LabelCache {
 public:
  std::shared_ptr<const std::vector<int>> get(std::uint64_t epoch, NodeId src, const TopologyView& view);
  std::size_t size() const;
  void clear();

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::pair<std::uint64_t, NodeId>, std::shared_ptr<const std::vector<int>>> labels_;
};

// Shortest up-down route over the centers' trees; ties go to the lowest
// center id. Throws Unreachable if no center reaches both ends.
Route hierarchical_route(const AddressMap& addresses, NodeId src, NodeId dst);

// Greedy advance, finishing with the first neighborhood route from the node
// where greedy stalls. Loops created by the splice are cut out.
Route greedy_with_fallback(const CoordinateMap& coords, const TopologyView& view, NodeId src, NodeId dst,
                           Metric metric = Metric::kEuclidean);

// ---------------------------------------------------------------------------
// Deadlock analysis
// ---------------------------------------------------------------------------

struct Channel {
  LinkId link = 0;
  int vc = 0;
  auto operator<=>(const Channel&) const = default;
};

// Routing function as seen by deadlock analysis: the channels a packet
// for dst may take next at `node`, given the channel it arrived on
// (nullptr at injection).
using RoutingRelation = std::function<void(NodeId node, const Channel* in, NodeId dst, std::vector<Channel>& out)>;

class ChannelDependencyGraph {
 public:
  ChannelDependencyGraph(const Topology& topology, int vc_count);

  int vc_count() const { return vc_count_; }
  int channel_count() const { return static_cast<int>(succ_.size()); }
  int index(Channel c) const { return c.link * vc_count_ + c.vc; }
  Channel channel(int index) const { return {index / vc_count_, index % vc_count_}; }

  // Throws InvalidParams if the links do not share the intermediate node.
  void add_dependency(Channel from, Channel to);
  const std::vector<int>& successors(int index) const { return succ_[index]; }
  std::size_t edge_count() const;

  // A directed cycle of channel indices, empty if acyclic.
  std::vector<int> find_cycle() const;

 private:
  const Topology* topology_;
  int vc_count_;
  std::vector<std::vector<int>> succ_;
};

// Dependencies reachable from injection at every node, per destination.
ChannelDependencyGraph build_cdg(const Topology& topology, int vc_count, const RoutingRelation& relation);
// Dependencies between consecutive links of explicit routes (single VC).
ChannelDependencyGraph build_cdg_from_routes(const Topology& topology, const std::vector<Route>& routes);
bool is_deadlock_free(const ChannelDependencyGraph& cdg);

// VC rule for XY on a torus: a packet moves to VC 1 when it takes a
// wraparound link and keeps it for the rest of that dimension.
int dateline_vc(const Topology& topology, const Channel* in, LinkId out);
// VC rule for DyXY on a mesh with two VCs: Y links use VC 1 for westbound
// packets and VC 0 otherwise; X links may use either. Returns a VC bitmask.
std::uint32_t double_y_vc_mask(const Topology& topology, int vc_count, NodeId cur, NodeId dst, LinkId out);

RoutingRelation xy_relation(const Topology& topology, int vc_count);
RoutingRelation dyxy_relation(const Topology& topology, int vc_count);
RoutingRelation minimal_adaptive_relation(const Topology& topology);
RoutingRelation greedy_relation(const Topology& topology, CoordinateMap coords, Metric metric);

}  // namespace noc
