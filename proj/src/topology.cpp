// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocsim/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "nocsim/error.hpp"

namespace noc {

std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::kMesh: return "mesh";
    case TopologyKind::kTorus: return "torus";
    case TopologyKind::kCirculant: return "circulant";
    case TopologyKind::kFlattenedButterfly: return "flattened_butterfly";
    case TopologyKind::kSynthesized: return "synthesized";
    case TopologyKind::kCustom: return "custom";
  }
  return "custom";
}

std::optional<TopologyKind> parse_topology_kind(const std::string& name) {
  for (auto k : {TopologyKind::kMesh, TopologyKind::kTorus, TopologyKind::kCirculant,
                 TopologyKind::kFlattenedButterfly, TopologyKind::kSynthesized, TopologyKind::kCustom}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

TopologyParams TopologyParams::mesh(int width, int height) {
  TopologyParams p;
  p.kind = TopologyKind::kMesh;
  p.width = width;
  p.height = height;
  return p;
}

TopologyParams TopologyParams::torus(int width, int height) {
  TopologyParams p = mesh(width, height);
  p.kind = TopologyKind::kTorus;
  return p;
}

TopologyParams TopologyParams::circulant(int nodes, std::vector<int> generators) {
  TopologyParams p;
  p.kind = TopologyKind::kCirculant;
  p.nodes = nodes;
  p.generators = std::move(generators);
  return p;
}

TopologyParams TopologyParams::flattened_butterfly(int rows, int cols, int concentration) {
  TopologyParams p;
  p.kind = TopologyKind::kFlattenedButterfly;
  p.rows = rows;
  p.cols = cols;
  p.concentration = concentration;
  return p;
}

Topology Topology::from_adjacency(const std::vector<std::vector<NodeId>>& neighbors,
                                  TopologyParams params) {
  const int n = static_cast<int>(neighbors.size());
  Topology t;
  t.params_ = std::move(params);
  t.out_.resize(n);
  for (NodeId u = 0; u < n; ++u) {
    std::set<NodeId> seen;
    for (NodeId v : neighbors[u]) {
      if (v < 0 || v >= n) throw Error(ErrorCode::kInvalidParams, "neighbor id out of range");
      if (v == u) throw Error(ErrorCode::kInvalidParams, "self-loop at node " + std::to_string(u));
      if (!seen.insert(v).second) continue;
      const int port = static_cast<int>(t.out_[u].size());
      t.out_[u].push_back(static_cast<LinkId>(t.links_.size()));
      t.links_.push_back(Link{u, v, port});
    }
  }
  t.reverse_.assign(t.links_.size(), -1);
  for (LinkId l = 0; l < t.link_count(); ++l) {
    auto r = t.find_link(t.links_[l].dst, t.links_[l].src);
    if (!r) throw Error(ErrorCode::kInvalidParams, "asymmetric adjacency");
    t.reverse_[l] = *r;
  }
  return t;
}

Topology Topology::from_edges(int node_count, const std::vector<std::pair<NodeId, NodeId>>& edges,
                              TopologyParams params) {
  if (node_count <= 0) throw Error(ErrorCode::kInvalidParams, "node count must be positive");
  std::vector<std::vector<NodeId>> adj(node_count);
  std::set<std::pair<NodeId, NodeId>> seen;
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= node_count || v >= node_count)
      throw Error(ErrorCode::kInvalidParams, "edge endpoint out of range");
    if (u == v) throw Error(ErrorCode::kInvalidParams, "self-loop at node " + std::to_string(u));
    if (!seen.insert(std::minmax(u, v)).second)
      throw Error(ErrorCode::kInvalidParams,
                  "duplicate edge " + std::to_string(u) + " " + std::to_string(v));
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return from_adjacency(adj, std::move(params));
}

int Topology::max_degree() const {
  int d = 0;
  for (const auto& o : out_) d = std::max(d, static_cast<int>(o.size()));
  return d;
}

std::optional<LinkId> Topology::find_link(NodeId src, NodeId dst) const {
  for (LinkId l : out_[src])
    if (links_[l].dst == dst) return l;
  return std::nullopt;
}

std::optional<int> Topology::port_to(NodeId src, NodeId dst) const {
  if (auto l = find_link(src, dst)) return links_[*l].port;
  return std::nullopt;
}

std::vector<std::pair<NodeId, NodeId>> Topology::undirected_edges() const {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (const Link& l : links_)
    if (l.src < l.dst) e.emplace_back(l.src, l.dst);
  std::sort(e.begin(), e.end());
  return e;
}

namespace {

Topology generate_grid(const TopologyParams& p, bool wrap) {
  if (p.width <= 0 || p.height <= 0) throw Error(ErrorCode::kInvalidParams, "grid sizes must be positive");
  const int w = p.width;
  const int h = p.height;
  std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(w) * h);
  auto add = [&](NodeId u, int x, int y) {
    if (wrap) {
      x = (x + w) % w;
      y = (y + h) % h;
    } else if (x < 0 || y < 0 || x >= w || y >= h) {
      return;
    }
    NodeId v = y * w + x;
    if (v != u) adj[u].push_back(v);
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      NodeId u = y * w + x;
      add(u, x + 1, y);  // east
      add(u, x - 1, y);  // west
      add(u, x, y + 1);  // north
      add(u, x, y - 1);  // south
    }
  }
  return Topology::from_adjacency(adj, p);
}

Topology generate_circulant(const TopologyParams& p) {
  const int n = p.nodes;
  if (n < 2) throw Error(ErrorCode::kInvalidParams, "circulant needs at least 2 nodes");
  if (p.generators.empty()) throw Error(ErrorCode::kInvalidParams, "circulant needs generators");
  std::set<int> distinct;
  for (int s : p.generators) {
    if (s < 1 || s > n / 2)
      throw Error(ErrorCode::kInvalidParams, "generator " + std::to_string(s) + " outside 1..N/2");
    if (!distinct.insert(s).second)
      throw Error(ErrorCode::kInvalidParams, "duplicate generator " + std::to_string(s));
  }
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId i = 0; i < n; ++i) {
    for (int s : p.generators) {
      adj[i].push_back((i + s) % n);
      adj[i].push_back((i - s + n) % n);
    }
  }
  return Topology::from_adjacency(adj, p);
}

Topology generate_flattened_butterfly(const TopologyParams& p) {
  if (p.rows <= 0 || p.cols <= 0 || p.concentration <= 0)
    throw Error(ErrorCode::kInvalidParams, "flattened butterfly sizes must be positive");
  std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(p.rows) * p.cols);
  for (int r = 0; r < p.rows; ++r) {
    for (int c = 0; c < p.cols; ++c) {
      NodeId u = r * p.cols + c;
      for (int r2 = 0; r2 < p.rows; ++r2)
        for (int c2 = 0; c2 < p.cols; ++c2)
          if ((r2 == r) != (c2 == c)) adj[u].push_back(r2 * p.cols + c2);
    }
  }
  return Topology::from_adjacency(adj, p);
}

}  // namespace

Topology generate(const TopologyParams& params) {
  Topology t;
  switch (params.kind) {
    case TopologyKind::kMesh: t = generate_grid(params, false); break;
    case TopologyKind::kTorus: t = generate_grid(params, true); break;
    case TopologyKind::kCirculant: t = generate_circulant(params); break;
    case TopologyKind::kFlattenedButterfly: t = generate_flattened_butterfly(params); break;
    default: throw Error(ErrorCode::kInvalidParams, "kind " + to_string(params.kind) + " has no generator");
  }
  if (!TopologyView(t).is_connected())
    throw Error(ErrorCode::kInvalidParams, "generated " + to_string(params.kind) + " is disconnected");
  return t;
}

TopologyView::TopologyView(const Topology& base)
    : base_(&base), node_alive_(base.node_count(), 1), link_alive_(base.link_count(), 1) {}

TopologyView::TopologyView(const Topology& base, const std::vector<NodeId>& failed_nodes,
                           const std::vector<LinkId>& failed_links)
    : TopologyView(base) {
  for (NodeId n : failed_nodes) node_alive_.at(n) = 0;
  for (LinkId l : failed_links) link_alive_.at(l) = 0;
}

int TopologyView::alive_node_count() const {
  return static_cast<int>(std::count(node_alive_.begin(), node_alive_.end(), 1));
}

bool TopologyView::is_connected() const {
  NodeId first = -1;
  for (NodeId n = 0; n < node_count(); ++n)
    if (node_alive(n)) {
      first = n;
      break;
    }
  if (first < 0) return true;
  // Strong connectivity: everything reachable from `first` forward and backward.
  auto reach = [&](bool forward) {
    std::vector<char> seen(node_count(), 0);
    std::deque<NodeId> q{first};
    seen[first] = 1;
    int count = 1;
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop_front();
      for (LinkId l : base_->out_links(u)) {
        LinkId use = forward ? l : base_->reverse(l);
        if (!link_alive(use)) continue;
        NodeId v = base_->link(l).dst;
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          q.push_back(v);
        }
      }
    }
    return count;
  };
  const int alive = alive_node_count();
  return reach(true) == alive && reach(false) == alive;
}

TopologyView alive_view(const Topology& topology, const std::vector<NodeId>& failed_nodes,
                        const std::vector<LinkId>& failed_links) {
  return TopologyView(topology, failed_nodes, failed_links);
}

std::vector<int> bfs_distances(const TopologyView& view, NodeId src) {
  const Topology& t = view.base();
  std::vector<int> dist(t.node_count(), -1);
  if (!view.node_alive(src)) return dist;
  std::deque<NodeId> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop_front();
    for (LinkId l : t.out_links(u)) {
      if (!view.link_alive(l)) continue;
      NodeId v = t.link(l).dst;
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push_back(v);
      }
    }
  }
  return dist;
}

std::vector<int> bfs_distances(const Topology& topology, NodeId src) {
  return bfs_distances(TopologyView(topology), src);
}

TopologyScore score(const Topology& topology) {
  TopologyScore s;
  s.max_degree = topology.max_degree();
  s.edge_count = topology.link_count() / 2;
  const int n = topology.node_count();
  if (n < 2) return s;
  long long total = 0;
  for (NodeId u = 0; u < n; ++u) {
    auto d = bfs_distances(topology, u);
    for (NodeId v = 0; v < n; ++v) {
      if (v == u) continue;
      if (d[v] < 0) throw Error(ErrorCode::kDisconnected, "node " + std::to_string(v) +
                                                              " unreachable from " + std::to_string(u));
      total += d[v];
      s.diameter = std::max(s.diameter, d[v]);
    }
  }
  s.avg_distance = static_cast<double>(total) / (static_cast<double>(n) * (n - 1));
  return s;
}

}  // namespace noc
