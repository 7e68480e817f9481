// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace noc {

using NodeId = int;
using LinkId = int;

enum class TopologyKind { kMesh, kTorus, kCirculant, kFlattenedButterfly, kSynthesized, kCustom };

std::string to_string(TopologyKind kind);
std::optional<TopologyKind> parse_topology_kind(const std::string& name);

// Generator parameters. Only the fields relevant to `kind` are meaningful.
struct TopologyParams {
  TopologyKind kind = TopologyKind::kMesh;
  int width = 0;
  int height = 0;
  int nodes = 0;                 // circulant N
  std::vector<int> generators;   // circulant offsets s1..sk
  int rows = 0;                  // flattened butterfly
  int cols = 0;
  int concentration = 1;         // cores per router (flattened butterfly)

  static TopologyParams mesh(int width, int height);
  static TopologyParams torus(int width, int height);
  static TopologyParams circulant(int nodes, std::vector<int> generators);
  static TopologyParams flattened_butterfly(int rows, int cols, int concentration);

  bool operator==(const TopologyParams&) const = default;
};

struct Link {
  NodeId src = 0;
  NodeId dst = 0;
  int port = 0;  // output port index at src

  bool operator==(const Link&) const = default;
};

// Immutable directed graph of routers. Every link u->v has a reverse v->u;
// port indices at each node are 0..degree-1 in insertion order.
class Topology {
 public:
  Topology() = default;

  // Builds from undirected edges; ports at each node are ordered by
  // neighbor id. Throws InvalidParams on self-loops, duplicates or
  // out-of-range ids.
  static Topology from_edges(int node_count, const std::vector<std::pair<NodeId, NodeId>>& edges,
                             TopologyParams params);

  // Builds from per-node neighbor lists in port order. Repeated neighbors
  // are collapsed; the relation must be symmetric.
  static Topology from_adjacency(const std::vector<std::vector<NodeId>>& neighbors,
                                 TopologyParams params);

  int node_count() const { return static_cast<int>(out_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId id) const { return links_[id]; }

  int degree(NodeId n) const { return static_cast<int>(out_[n].size()); }
  int max_degree() const;
  LinkId out_link(NodeId n, int port) const { return out_[n][port]; }
  const std::vector<LinkId>& out_links(NodeId n) const { return out_[n]; }
  NodeId neighbor(NodeId n, int port) const { return links_[out_[n][port]].dst; }
  LinkId reverse(LinkId id) const { return reverse_[id]; }
  std::optional<LinkId> find_link(NodeId src, NodeId dst) const;
  std::optional<int> port_to(NodeId src, NodeId dst) const;

  TopologyKind kind() const { return params_.kind; }
  const TopologyParams& params() const { return params_; }

  // Undirected edges (u < v), sorted lexicographically.
  std::vector<std::pair<NodeId, NodeId>> undirected_edges() const;

  // Grid helpers for mesh/torus (row-major ids).
  int grid_x(NodeId n) const { return n % params_.width; }
  int grid_y(NodeId n) const { return n / params_.width; }
  NodeId grid_node(int x, int y) const { return y * params_.width + x; }
  bool is_grid() const { return params_.kind == TopologyKind::kMesh || params_.kind == TopologyKind::kTorus; }

  // Cores attached to each router; 1 except for concentrated butterflies.
  int concentration() const { return params_.concentration < 1 ? 1 : params_.concentration; }

  bool operator==(const Topology&) const = default;

 private:
  TopologyParams params_;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> out_;
  std::vector<LinkId> reverse_;
};

Topology generate(const TopologyParams& params);

// A fault overlay on a topology. The base is referenced, never copied or
// modified; the view must not outlive it.
class TopologyView {
 public:
  explicit TopologyView(const Topology& base);
  TopologyView(const Topology& base, const std::vector<NodeId>& failed_nodes,
               const std::vector<LinkId>& failed_links);

  const Topology& base() const { return *base_; }
  int node_count() const { return base_->node_count(); }
  bool node_alive(NodeId n) const { return node_alive_[n] != 0; }
  // A link is usable only if it and both endpoints are alive.
  bool link_alive(LinkId l) const {
    const Link& k = base_->link(l);
    return link_alive_[l] != 0 && node_alive_[k.src] != 0 && node_alive_[k.dst] != 0;
  }
  int alive_node_count() const;
  // Strong connectivity over alive nodes and links.
  bool is_connected() const;

  void fail_node(NodeId n) { node_alive_[n] = 0; }
  void fail_link(LinkId l) { link_alive_[l] = 0; }

 private:
  const Topology* base_;
  std::vector<char> node_alive_;
  std::vector<char> link_alive_;
};

TopologyView alive_view(const Topology& topology, const std::vector<NodeId>& failed_nodes,
                        const std::vector<LinkId>& failed_links);

// Hop distances from src over alive elements; -1 where unreachable.
std::vector<int> bfs_distances(const TopologyView& view, NodeId src);
std::vector<int> bfs_distances(const Topology& topology, NodeId src);

struct TopologyScore {
  int diameter = 0;
  double avg_distance = 0.0;
  int max_degree = 0;
  int edge_count = 0;
};

TopologyScore score(const Topology& topology);

struct SynthesisRequest {
  int nodes = 0;
  int max_degree = 0;
  int max_diameter = 0;
  std::uint64_t seed = 1;
  int budget = 20000;
};

Topology synthesize(const SynthesisRequest& request);

// Plain-text edge list: "nodes N" then one "u v" line per undirected edge.
void write_edge_list(std::ostream& out, const Topology& topology);
std::string to_edge_list(const Topology& topology);
Topology read_edge_list(std::istream& in);
Topology parse_edge_list(const std::string& text);

}  // namespace noc
