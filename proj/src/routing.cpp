// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocsim/routing.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <set>

#include "nocsim/error.hpp"

namespace noc {

std::string to_string(RoutingDecision::Kind kind) {
  switch (kind) {
    case RoutingDecision::Kind::kForward: return "Forward";
    case RoutingDecision::Kind::kArrived: return "Arrived";
    case RoutingDecision::Kind::kLocalMinimum: return "LocalMinimum";
    case RoutingDecision::Kind::kNoRoute: return "NoRoute";
    case RoutingDecision::Kind::kCoordinateAliasing: return "CoordinateAliasing";
  }
  return "NoRoute";
}

bool is_valid_route(const TopologyView& view, const Route& route) {
  if (route.empty()) return false;
  std::set<NodeId> seen;
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (!view.node_alive(route[i]) || !seen.insert(route[i]).second) return false;
    if (i + 1 < route.size()) {
      auto l = view.base().find_link(route[i], route[i + 1]);
      if (!l || !view.link_alive(*l)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Dimension order
// ---------------------------------------------------------------------------

namespace {

void require_grid(const Topology& t) {
  if (!t.is_grid()) throw Error(ErrorCode::kWrongTopologyKind, "needs mesh or torus, got " + to_string(t.kind()));
}

// Signed step (+1/-1/0) along one dimension.
int grid_step(int from, int to, int size, bool wrap) {
  if (from == to) return 0;
  if (!wrap) return to > from ? 1 : -1;
  int forward = ((to - from) % size + size) % size;
  return forward <= size - forward ? 1 : -1;
}

int axis_distance(int a, int b, int size, bool wrap) {
  int d = std::abs(a - b);
  return wrap ? std::min(d, size - d) : d;
}

int port_toward(const Topology& t, NodeId cur, int x, int y) {
  const int w = t.params().width;
  const int h = t.params().height;
  x = (x + w) % w;
  y = (y + h) % h;
  auto p = t.port_to(cur, t.grid_node(x, y));
  return p ? *p : -1;
}

}  // namespace

int grid_distance(const Topology& t, NodeId a, NodeId b) {
  require_grid(t);
  const bool wrap = t.kind() == TopologyKind::kTorus;
  return axis_distance(t.grid_x(a), t.grid_x(b), t.params().width, wrap) +
         axis_distance(t.grid_y(a), t.grid_y(b), t.params().height, wrap);
}

int xy_port(const Topology& t, NodeId cur, NodeId dst) {
  require_grid(t);
  const bool wrap = t.kind() == TopologyKind::kTorus;
  const int cx = t.grid_x(cur);
  const int cy = t.grid_y(cur);
  if (int sx = grid_step(cx, t.grid_x(dst), t.params().width, wrap); sx != 0)
    return port_toward(t, cur, cx + sx, cy);
  if (int sy = grid_step(cy, t.grid_y(dst), t.params().height, wrap); sy != 0)
    return port_toward(t, cur, cx, cy + sy);
  return -1;
}

Route route_xy(const Topology& t, NodeId src, NodeId dst) {
  Route r{src};
  NodeId cur = src;
  for (int port = xy_port(t, cur, dst); port >= 0; port = xy_port(t, cur, dst)) {
    cur = t.neighbor(cur, port);
    r.push_back(cur);
  }
  return r;
}

std::vector<int> minimal_grid_ports(const Topology& t, NodeId cur, NodeId dst) {
  require_grid(t);
  const bool wrap = t.kind() == TopologyKind::kTorus;
  const int cx = t.grid_x(cur);
  const int cy = t.grid_y(cur);
  std::vector<int> ports;
  if (int sx = grid_step(cx, t.grid_x(dst), t.params().width, wrap); sx != 0)
    ports.push_back(port_toward(t, cur, cx + sx, cy));
  if (int sy = grid_step(cy, t.grid_y(dst), t.params().height, wrap); sy != 0)
    ports.push_back(port_toward(t, cur, cx, cy + sy));
  return ports;
}

RoutingDecision next_hop_dyxy(const TopologyView& view, NodeId cur, NodeId dst,
                              std::span<const int> occupancy_by_port) {
  const Topology& t = view.base();
  if (t.kind() != TopologyKind::kMesh) throw Error(ErrorCode::kWrongTopologyKind, "DyXY needs a mesh");
  if (cur == dst) return RoutingDecision::arrived();
  int best = -1;
  for (int port : minimal_grid_ports(t, cur, dst)) {
    if (!view.link_alive(t.out_link(cur, port))) continue;
    if (best < 0 || occupancy_by_port[port] < occupancy_by_port[best]) best = port;
  }
  return best < 0 ? RoutingDecision::no_route() : RoutingDecision::forward(best);
}

RoutingDecision next_hop_dyxy(const Topology& topology, NodeId cur, NodeId dst,
                              std::span<const int> occupancy_by_port) {
  return next_hop_dyxy(TopologyView(topology), cur, dst, occupancy_by_port);
}

// ---------------------------------------------------------------------------
// Greedy advance
// ---------------------------------------------------------------------------

namespace {

// Order-preserving integer stand-in for coordinate_distance: squared norm
// for Euclidean, the sum itself for L1. Keeps tie detection exact.
long long distance_key(const Coordinate& a, const Coordinate& b, Metric metric) {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "coordinate sizes differ");
  long long acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    long long d = static_cast<long long>(a[i]) - b[i];
    acc += metric == Metric::kL1 ? std::llabs(d) : d * d;
  }
  return acc;
}

}  // namespace

RoutingDecision next_hop_greedy(const CoordinateMap& coords, Metric metric, const TopologyView& view,
                                NodeId cur, NodeId dst) {
  if (cur == dst) return RoutingDecision::arrived();
  const Coordinate& target = coords[dst];
  const long long here = distance_key(coords[cur], target, metric);
  if (here == 0) return RoutingDecision::aliasing();
  const Topology& t = view.base();
  int best_port = -1;
  long long best = here;
  for (int p = 0; p < t.degree(cur); ++p) {
    LinkId l = t.out_link(cur, p);
    if (!view.link_alive(l)) continue;
    long long d = distance_key(coords[t.link(l).dst], target, metric);
    if (d < best) {
      best = d;
      best_port = p;
    }
  }
  return best_port < 0 ? RoutingDecision::local_minimum() : RoutingDecision::forward(best_port);
}

// ---------------------------------------------------------------------------
// Neighborhood method
// ---------------------------------------------------------------------------

std::vector<int> neighborhood_labels(const TopologyView& view, NodeId src) { return bfs_distances(view, src); }

namespace {

// Predecessors of v one label closer to the source, ascending id.
void label_predecessors(const TopologyView& view, const std::vector<int>& labels, NodeId v,
                        std::vector<NodeId>& out) {
  const Topology& t = view.base();
  out.clear();
  for (LinkId l : t.out_links(v)) {
    NodeId u = t.link(l).dst;
    if (labels[u] == labels[v] - 1 && view.link_alive(t.reverse(l))) out.push_back(u);
  }
  std::sort(out.begin(), out.end());
}

}  // namespace

std::vector<Route> neighborhood_routes(const TopologyView& view, NodeId src, NodeId dst, std::size_t budget) {
  if (!view.node_alive(src) || !view.node_alive(dst))
    throw Error(ErrorCode::kUnreachable, "endpoint " + std::to_string(view.node_alive(src) ? dst : src) + " is down");
  const std::vector<int> labels = neighborhood_labels(view, src);
  if (labels[dst] < 0) throw Error(ErrorCode::kUnreachable, std::to_string(dst) + " not labeled from " + std::to_string(src));

  std::vector<Route> routes;
  std::vector<NodeId> stack_path{dst};  // reversed: dst ... current
  std::vector<std::vector<NodeId>> choices(labels[dst] + 1);
  std::vector<std::size_t> next_choice(labels[dst] + 1, 0);
  // Iterative DFS; depth i of stack_path holds the node with label labels[dst]-i.
  label_predecessors(view, labels, dst, choices[0]);
  if (dst == src) return {Route{src}};
  while (!stack_path.empty()) {
    const std::size_t depth = stack_path.size() - 1;
    NodeId v = stack_path.back();
    if (v == src) {
      if (routes.size() == budget)
        throw Error(ErrorCode::kBudgetExceeded, "more than " + std::to_string(budget) + " routes");
      routes.emplace_back(stack_path.rbegin(), stack_path.rend());
      stack_path.pop_back();
      continue;
    }
    if (next_choice[depth] < choices[depth].size()) {
      NodeId u = choices[depth][next_choice[depth]++];
      stack_path.push_back(u);
      if (u != src) {
        label_predecessors(view, labels, u, choices[depth + 1]);
        next_choice[depth + 1] = 0;
      }
    } else {
      stack_path.pop_back();
    }
  }
  return routes;
}

Route first_neighborhood_route(const TopologyView& view, const std::vector<int>& labels, NodeId dst) {
  if (labels[dst] < 0) throw Error(ErrorCode::kUnreachable, std::to_string(dst) + " not labeled");
  Route reversed{dst};
  std::vector<NodeId> preds;
  for (NodeId v = dst; labels[v] > 0;) {
    label_predecessors(view, labels, v, preds);
    v = preds.front();  // non-empty: BFS labels always have a parent
    reversed.push_back(v);
  }
  return Route(reversed.rbegin(), reversed.rend());
}

std::shared_ptr<const std::vector<int>> LabelCache::get(std::uint64_t epoch, NodeId src, const TopologyView& view) {
  const auto key = std::make_pair(epoch, src);
  {
    std::shared_lock lock(mutex_);
    if (auto it = labels_.find(key); it != labels_.end()) return it->second;
  }
  auto computed = std::make_shared<const std::vector<int>>(neighborhood_labels(view, src));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = labels_.emplace(key, std::move(computed));
  return it->second;
}

std::size_t LabelCache::size() const {
  std::shared_lock lock(mutex_);
  return labels_.size();
}

void LabelCache::clear() {
  std::unique_lock lock(mutex_);
  labels_.clear();
}

// ---------------------------------------------------------------------------
// Hierarchical
// ---------------------------------------------------------------------------

Route hierarchical_route(const AddressMap& addresses, NodeId src, NodeId dst) {
  if (src == dst) return Route{src};
  auto up_path = [&](NodeId n, std::size_t c) {
    std::vector<NodeId> path{n};
    while (addresses.entry(path.back(), c).parent >= 0) path.push_back(addresses.entry(path.back(), c).parent);
    return path;
  };
  Route best;
  NodeId best_center = -1;
  for (std::size_t c = 0; c < addresses.centers.size(); ++c) {
    if (addresses.entry(src, c).depth < 0 || addresses.entry(dst, c).depth < 0) continue;
    auto up_src = up_path(src, c);
    auto up_dst = up_path(dst, c);
    // Deepest common node: both paths end at the center, so walk the shared tail.
    std::size_t i = up_src.size();
    std::size_t j = up_dst.size();
    while (i > 0 && j > 0 && up_src[i - 1] == up_dst[j - 1]) {
      --i;
      --j;
    }
    Route candidate(up_src.begin(), up_src.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    for (std::size_t k = j; k-- > 0;) candidate.push_back(up_dst[k]);
    const NodeId center = addresses.centers[c];
    if (best.empty() || candidate.size() < best.size() || (candidate.size() == best.size() && center < best_center)) {
      best = std::move(candidate);
      best_center = center;
    }
  }
  if (best.empty())
    throw Error(ErrorCode::kUnreachable, "no center reaches both " + std::to_string(src) + " and " + std::to_string(dst));
  return best;
}

// ---------------------------------------------------------------------------
// Greedy with fallback
// ---------------------------------------------------------------------------

Route greedy_with_fallback(const CoordinateMap& coords, const TopologyView& view, NodeId src, NodeId dst,
                           Metric metric) {
  if (!view.node_alive(src) || !view.node_alive(dst) || bfs_distances(view, src)[dst] < 0)
    throw Error(ErrorCode::kUnreachable, std::to_string(dst) + " unreachable from " + std::to_string(src));
  const Topology& t = view.base();
  Route route{src};
  NodeId cur = src;
  for (;;) {
    RoutingDecision d = next_hop_greedy(coords, metric, view, cur, dst);
    if (d.kind == RoutingDecision::Kind::kArrived) return route;
    if (d.kind != RoutingDecision::Kind::kForward) break;
    cur = t.neighbor(cur, d.port);
    route.push_back(cur);
  }
  Route tail = first_neighborhood_route(view, neighborhood_labels(view, cur), dst);
  for (std::size_t i = 1; i < tail.size(); ++i) {
    auto seen = std::find(route.begin(), route.end(), tail[i]);
    if (seen != route.end()) {
      route.erase(seen + 1, route.end());
    } else {
      route.push_back(tail[i]);
    }
  }
  return route;
}

// ---------------------------------------------------------------------------
// Channel dependency graph
// ---------------------------------------------------------------------------

ChannelDependencyGraph::ChannelDependencyGraph(const Topology& topology, int vc_count)
    : topology_(&topology), vc_count_(vc_count), succ_(static_cast<std::size_t>(topology.link_count()) * vc_count) {
  if (vc_count < 1) throw Error(ErrorCode::kInvalidParams, "vc_count must be positive");
}

void ChannelDependencyGraph::add_dependency(Channel from, Channel to) {
  if (topology_->link(from.link).dst != topology_->link(to.link).src)
    throw Error(ErrorCode::kInvalidParams, "dependency between non-adjacent links");
  auto& s = succ_[index(from)];
  int target = index(to);
  if (std::find(s.begin(), s.end(), target) == s.end()) s.push_back(target);
}

std::size_t ChannelDependencyGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& s : succ_) n += s.size();
  return n;
}

std::vector<int> ChannelDependencyGraph::find_cycle() const {
  const int n = channel_count();
  std::vector<char> color(n, 0);  // 0 white, 1 on stack, 2 done
  std::vector<int> parent(n, -1);
  std::vector<std::pair<int, std::size_t>> stack;
  for (int root = 0; root < n; ++root) {
    if (color[root]) continue;
    stack.emplace_back(root, 0);
    color[root] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < succ_[v].size()) {
        int w = succ_[v][next++];
        if (color[w] == 1) {
          std::vector<int> cycle{w};
          for (int x = v; x != w; x = parent[x]) cycle.push_back(x);
          std::reverse(cycle.begin() + 1, cycle.end());
          return cycle;
        }
        if (color[w] == 0) {
          color[w] = 1;
          parent[w] = v;
          stack.emplace_back(w, 0);
        }
      } else {
        color[v] = 2;
        stack.pop_back();
      }
    }
  }
  return {};
}

ChannelDependencyGraph build_cdg(const Topology& topology, int vc_count, const RoutingRelation& relation) {
  ChannelDependencyGraph cdg(topology, vc_count);
  const int channels = cdg.channel_count();
  std::vector<Channel> next;
  std::vector<char> reached(channels);
  std::vector<int> work;
  for (NodeId dst = 0; dst < topology.node_count(); ++dst) {
    std::fill(reached.begin(), reached.end(), 0);
    work.clear();
    auto visit = [&](Channel c) {
      int i = cdg.index(c);
      if (!reached[i]) {
        reached[i] = 1;
        work.push_back(i);
      }
    };
    for (NodeId src = 0; src < topology.node_count(); ++src) {
      if (src == dst) continue;
      next.clear();
      relation(src, nullptr, dst, next);
      for (Channel c : next) visit(c);
    }
    while (!work.empty()) {
      Channel c = cdg.channel(work.back());
      work.pop_back();
      NodeId at = topology.link(c.link).dst;
      if (at == dst) continue;
      next.clear();
      relation(at, &c, dst, next);
      for (Channel n : next) {
        cdg.add_dependency(c, n);
        visit(n);
      }
    }
  }
  return cdg;
}

ChannelDependencyGraph build_cdg_from_routes(const Topology& topology, const std::vector<Route>& routes) {
  ChannelDependencyGraph cdg(topology, 1);
  for (const Route& r : routes) {
    for (std::size_t i = 0; i + 2 < r.size(); ++i) {
      auto a = topology.find_link(r[i], r[i + 1]);
      auto b = topology.find_link(r[i + 1], r[i + 2]);
      if (!a || !b) throw Error(ErrorCode::kInvalidParams, "route uses a missing link");
      cdg.add_dependency({*a, 0}, {*b, 0});
    }
  }
  return cdg;
}

bool is_deadlock_free(const ChannelDependencyGraph& cdg) { return cdg.find_cycle().empty(); }

namespace {

bool is_x_link(const Topology& t, LinkId l) { return t.grid_y(t.link(l).src) == t.grid_y(t.link(l).dst); }

bool is_wrap_link(const Topology& t, LinkId l) {
  const Link& k = t.link(l);
  if (t.kind() != TopologyKind::kTorus) return false;
  if (is_x_link(t, l)) return std::abs(t.grid_x(k.src) - t.grid_x(k.dst)) > 1;
  return std::abs(t.grid_y(k.src) - t.grid_y(k.dst)) > 1;
}

}  // namespace

int dateline_vc(const Topology& t, const Channel* in, LinkId out) {
  if (is_wrap_link(t, out)) return 1;
  if (in != nullptr && in->vc == 1 && is_x_link(t, in->link) == is_x_link(t, out)) return 1;
  return 0;
}

std::uint32_t double_y_vc_mask(const Topology& t, int vc_count, NodeId cur, NodeId dst, LinkId out) {
  const std::uint32_t all = vc_count >= 32 ? ~0U : ((1U << vc_count) - 1U);
  if (vc_count < 2 || is_x_link(t, out)) return all;
  return t.grid_x(dst) < t.grid_x(cur) ? 0b10U : 0b01U;
}

RoutingRelation xy_relation(const Topology& topology, int vc_count) {
  const Topology* t = &topology;
  const bool dateline = topology.kind() == TopologyKind::kTorus && vc_count >= 2;
  return [t, dateline](NodeId node, const Channel* in, NodeId dst, std::vector<Channel>& out) {
    int port = xy_port(*t, node, dst);
    if (port < 0) return;
    LinkId l = t->out_link(node, port);
    out.push_back({l, dateline ? dateline_vc(*t, in, l) : 0});
  };
}

RoutingRelation dyxy_relation(const Topology& topology, int vc_count) {
  if (topology.kind() != TopologyKind::kMesh) throw Error(ErrorCode::kWrongTopologyKind, "DyXY needs a mesh");
  const Topology* t = &topology;
  return [t, vc_count](NodeId node, const Channel*, NodeId dst, std::vector<Channel>& out) {
    for (int port : minimal_grid_ports(*t, node, dst)) {
      LinkId l = t->out_link(node, port);
      std::uint32_t mask = double_y_vc_mask(*t, vc_count, node, dst, l);
      for (int v = 0; v < vc_count; ++v)
        if ((mask >> v) & 1U) out.push_back({l, v});
    }
  };
}

RoutingRelation minimal_adaptive_relation(const Topology& topology) {
  std::vector<std::vector<int>> dist;
  for (NodeId n = 0; n < topology.node_count(); ++n) dist.push_back(bfs_distances(topology, n));
  const Topology* t = &topology;
  return [t, dist = std::move(dist)](NodeId node, const Channel*, NodeId dst, std::vector<Channel>& out) {
    for (LinkId l : t->out_links(node))
      if (dist[t->link(l).dst][dst] == dist[node][dst] - 1) out.push_back({l, 0});
  };
}

RoutingRelation greedy_relation(const Topology& topology, CoordinateMap coords, Metric metric) {
  const Topology* t = &topology;
  return [t, coords = std::move(coords), metric](NodeId node, const Channel*, NodeId dst, std::vector<Channel>& out) {
    RoutingDecision d = next_hop_greedy(coords, metric, TopologyView(*t), node, dst);
    if (d.kind == RoutingDecision::Kind::kForward) out.push_back({t->out_link(node, d.port), 0});
  };
}

}  // namespace noc
