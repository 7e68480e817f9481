// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nocsim/topology.hpp"

namespace noc {

enum class Metric { kEuclidean, kL1 };

using Coordinate = std::vector<int>;

// Static virtual coordinates: component i of a node's vector is its hop
// distance to anchors[i], computed once on the fault-free topology.
struct CoordinateMap {
  std::vector<NodeId> anchors;
  std::vector<Coordinate> coords;

  const Coordinate& operator[](NodeId n) const { return coords[n]; }
  bool operator==(const CoordinateMap&) const = default;
};

CoordinateMap assign_virtual_coordinates(const Topology& topology, const std::vector<NodeId>& anchors);

// Farthest-point sampling from node 0, ties to the lowest id.
std::vector<NodeId> default_anchors(const Topology& topology, int k);

double coordinate_distance(const Coordinate& a, const Coordinate& b, Metric metric = Metric::kEuclidean);

// "id: c1 c2 ... ck" per node.
void write_coordinates(std::ostream& out, const CoordinateMap& map);
std::string to_string(const CoordinateMap& map);

struct TreeEntry {
  int parent_port = -1;  // -1 at the center itself or when unreachable
  NodeId parent = -1;
  int depth = -1;        // -1 when unreachable
};

// One shortest-path tree per center; entries[node][center_index].
struct AddressMap {
  std::vector<NodeId> centers;
  std::vector<std::vector<TreeEntry>> entries;

  const TreeEntry& entry(NodeId node, std::size_t center_index) const { return entries[node][center_index]; }
  bool operator==(const AddressMap&) const = default;
};

AddressMap assign_hierarchical_addresses(const Topology& topology, const std::vector<NodeId>& centers);

// Trees over the alive part of a view. An edge is used only when both of
// its directions are alive; nodes a center cannot reach keep depth -1.
AddressMap build_address_trees(const TopologyView& view, const std::vector<NodeId>& centers);

}  // namespace noc
