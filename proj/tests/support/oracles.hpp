// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

// Reference implementations used only by tests. They are deliberately
// written differently from the library code they check: all-pairs
// distances come from Floyd-Warshall rather than BFS, shortest routes are
// enumerated forward from the source, and synthesis optima come from
// brute force over every graph.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "nocsim/error.hpp"
#include "nocsim/routing.hpp"
#include "nocsim/topology.hpp"

namespace noc::oracle {

inline constexpr int kFar = 1 << 28;

using DistanceMatrix = std::vector<std::vector<int>>;

inline DistanceMatrix floyd_warshall(const TopologyView& view) {
  const Topology& t = view.base();
  const int n = t.node_count();
  DistanceMatrix d(n, std::vector<int>(n, kFar));
  for (int u = 0; u < n; ++u) {
    if (!view.node_alive(u)) continue;
    d[u][u] = 0;
  }
  for (LinkId l = 0; l < t.link_count(); ++l)
    if (view.link_alive(l)) d[t.link(l).src][t.link(l).dst] = 1;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

inline DistanceMatrix floyd_warshall(const Topology& t) { return floyd_warshall(TopologyView(t)); }

inline bool adjacent_alive(const TopologyView& view, NodeId u, NodeId v) {
  auto l = view.base().find_link(u, v);
  return l && view.link_alive(*l);
}

// Every shortest route, found by walking forward from src through
// neighbors that are one step closer to dst. Sorted.
inline std::vector<Route> all_shortest_paths_oracle(const TopologyView& view, NodeId src, NodeId dst,
                                                    const DistanceMatrix& d) {
  if (d[src][dst] >= kFar) throw Error(ErrorCode::kUnreachable, "oracle: unreachable");
  std::vector<Route> out;
  Route path{src};
  auto walk = [&](auto&& self, NodeId u) -> void {
    if (u == dst) {
      out.push_back(path);
      return;
    }
    const Topology& t = view.base();
    for (int p = 0; p < t.degree(u); ++p) {
      NodeId v = t.neighbor(u, p);
      if (!view.link_alive(t.out_link(u, p)) || d[v][dst] != d[u][dst] - 1) continue;
      path.push_back(v);
      self(self, v);
      path.pop_back();
    }
  };
  walk(walk, src);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Route> all_shortest_paths_oracle(const TopologyView& view, NodeId src, NodeId dst) {
  return all_shortest_paths_oracle(view, src, dst, floyd_warshall(view));
}

// Random spanning tree plus extra chords, always connected.
inline Topology random_connected_graph(int n, int extra_edges, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::set<std::pair<NodeId, NodeId>> edges;
  for (NodeId v = 1; v < n; ++v) {
    NodeId u = static_cast<NodeId>(rng() % static_cast<std::uint64_t>(v));
    edges.insert({u, v});
  }
  for (int tries = 0; tries < extra_edges * 8 && static_cast<int>(edges.size()) < n - 1 + extra_edges; ++tries) {
    NodeId a = static_cast<NodeId>(rng() % static_cast<std::uint64_t>(n));
    NodeId b = static_cast<NodeId>(rng() % static_cast<std::uint64_t>(n));
    if (a == b) continue;
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  TopologyParams params;
  params.kind = TopologyKind::kCustom;
  return Topology::from_edges(n, {edges.begin(), edges.end()}, params);
}

struct ExhaustiveOptimum {
  int edges = 0;
  double avg_distance = 0.0;
};

// Brute force over all 2^(n(n-1)/2) graphs on n labeled nodes.
inline std::optional<ExhaustiveOptimum> min_edges_exhaustive(int n, int max_degree, int max_diameter) {
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) pairs.push_back({u, v});
  std::optional<ExhaustiveOptimum> best;
  const std::uint64_t total = 1ULL << pairs.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const int e = __builtin_popcountll(mask);
    if (best && e > best->edges) continue;
    std::vector<int> deg(n, 0);
    std::vector<std::vector<int>> d(n, std::vector<int>(n, kFar));
    for (int u = 0; u < n; ++u) d[u][u] = 0;
    bool ok = true;
    for (std::size_t i = 0; i < pairs.size() && ok; ++i) {
      if (!((mask >> i) & 1ULL)) continue;
      auto [u, v] = pairs[i];
      if (++deg[u] > max_degree || ++deg[v] > max_degree) ok = false;
      d[u][v] = d[v][u] = 1;
    }
    if (!ok) continue;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    int diam = 0;
    long sum = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        diam = std::max(diam, d[i][j]);
        sum += d[i][j];
      }
    if (diam > max_diameter) continue;
    const double avg = static_cast<double>(sum) / (n * (n - 1));
    if (!best || e < best->edges || (e == best->edges && avg < best->avg_distance)) best = ExhaustiveOptimum{e, avg};
  }
  return best;
}

inline int manhattan(const Topology& t, NodeId a, NodeId b) {
  return std::abs(t.grid_x(a) - t.grid_x(b)) + std::abs(t.grid_y(a) - t.grid_y(b));
}

}  // namespace noc::oracle
