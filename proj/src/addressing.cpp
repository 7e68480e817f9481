// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocsim/addressing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "nocsim/error.hpp"

namespace noc {

CoordinateMap assign_virtual_coordinates(const Topology& topology, const std::vector<NodeId>& anchors) {
  if (anchors.empty()) throw Error(ErrorCode::kEmptyAnchors, "at least one anchor is required");
  std::set<NodeId> seen;
  for (NodeId a : anchors) {
    if (a < 0 || a >= topology.node_count())
      throw Error(ErrorCode::kInvalidParams, "anchor " + std::to_string(a) + " is not a node");
    if (!seen.insert(a).second) throw Error(ErrorCode::kDuplicateAnchor, "anchor " + std::to_string(a));
  }
  CoordinateMap map;
  map.anchors = anchors;
  map.coords.assign(topology.node_count(), Coordinate(anchors.size(), 0));
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    auto dist = bfs_distances(topology, anchors[i]);
    for (NodeId n = 0; n < topology.node_count(); ++n) {
      if (dist[n] < 0)
        throw Error(ErrorCode::kDisconnected, "node " + std::to_string(n) + " cannot reach anchor " +
                                                  std::to_string(anchors[i]));
      map.coords[n][i] = dist[n];
    }
  }
  return map;
}

std::vector<NodeId> default_anchors(const Topology& topology, int k) {
  const int n = topology.node_count();
  if (k < 1) throw Error(ErrorCode::kInvalidParams, "anchor count must be at least 1");
  if (k > n) throw Error(ErrorCode::kKTooLarge, "k=" + std::to_string(k) + " exceeds " + std::to_string(n) + " nodes");
  std::vector<NodeId> anchors{0};
  std::vector<int> nearest = bfs_distances(topology, 0);
  std::vector<char> chosen(n, 0);
  chosen[0] = 1;
  while (static_cast<int>(anchors.size()) < k) {
    NodeId pick = -1;
    for (NodeId v = 0; v < n; ++v) {
      if (chosen[v]) continue;
      // Unreachable nodes count as infinitely far.
      auto key = [&](NodeId x) { return nearest[x] < 0 ? std::numeric_limits<int>::max() : nearest[x]; };
      if (pick < 0 || key(v) > key(pick)) pick = v;
    }
    anchors.push_back(pick);
    chosen[pick] = 1;
    auto d = bfs_distances(topology, pick);
    for (NodeId v = 0; v < n; ++v)
      if (d[v] >= 0 && (nearest[v] < 0 || d[v] < nearest[v])) nearest[v] = d[v];
  }
  return anchors;
}

double coordinate_distance(const Coordinate& a, const Coordinate& b, Metric metric) {
  if (a.size() != b.size())
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " components");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = static_cast<double>(a[i]) - b[i];
    acc += metric == Metric::kL1 ? std::abs(d) : d * d;
  }
  return metric == Metric::kL1 ? acc : std::sqrt(acc);
}

void write_coordinates(std::ostream& out, const CoordinateMap& map) {
  for (std::size_t n = 0; n < map.coords.size(); ++n) {
    out << n << ':';
    for (int c : map.coords[n]) out << ' ' << c;
    out << '\n';
  }
}

std::string to_string(const CoordinateMap& map) {
  std::ostringstream os;
  write_coordinates(os, map);
  return os.str();
}

AddressMap build_address_trees(const TopologyView& view, const std::vector<NodeId>& centers) {
  const Topology& t = view.base();
  AddressMap map;
  map.centers = centers;
  map.entries.assign(t.node_count(), std::vector<TreeEntry>(centers.size()));
  auto usable = [&](LinkId l) { return view.link_alive(l) && view.link_alive(t.reverse(l)); };
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const NodeId root = centers[c];
    if (!view.node_alive(root)) continue;
    std::vector<int> depth(t.node_count(), -1);
    std::deque<NodeId> q{root};
    depth[root] = 0;
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop_front();
      for (LinkId l : t.out_links(u)) {
        if (!usable(l)) continue;
        NodeId v = t.link(l).dst;
        if (depth[v] < 0) {
          depth[v] = depth[u] + 1;
          q.push_back(v);
        }
      }
    }
    for (NodeId v = 0; v < t.node_count(); ++v) {
      TreeEntry& e = map.entries[v][c];
      e.depth = depth[v];
      if (depth[v] <= 0) continue;
      for (int p = 0; p < t.degree(v); ++p) {
        LinkId l = t.out_link(v, p);
        NodeId w = t.link(l).dst;
        if (usable(l) && depth[w] == depth[v] - 1 && (e.parent < 0 || w < e.parent)) {
          e.parent = w;
          e.parent_port = p;
        }
      }
    }
  }
  return map;
}

AddressMap assign_hierarchical_addresses(const Topology& topology, const std::vector<NodeId>& centers) {
  if (centers.empty()) throw Error(ErrorCode::kEmptyCenters, "at least one center is required");
  std::set<NodeId> seen;
  for (NodeId c : centers) {
    if (c < 0 || c >= topology.node_count())
      throw Error(ErrorCode::kInvalidParams, "center " + std::to_string(c) + " is not a node");
    if (!seen.insert(c).second) throw Error(ErrorCode::kInvalidParams, "duplicate center " + std::to_string(c));
  }
  AddressMap map = build_address_trees(TopologyView(topology), centers);
  for (NodeId v = 0; v < topology.node_count(); ++v)
    for (std::size_t c = 0; c < centers.size(); ++c)
      if (map.entries[v][c].depth < 0)
        throw Error(ErrorCode::kDisconnected,
                    "node " + std::to_string(v) + " unreachable from center " + std::to_string(centers[c]));
  return map;
}

}  // namespace noc
