// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

// Constrained topology synthesis: fewest edges under a degree and diameter
// cap, average distance as tie-breaker. Seeded local search over edge sets,
// with exhaustive enumeration certifying small cases the search gives up on.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "nocsim/error.hpp"
#include "nocsim/topology.hpp"

namespace noc {
namespace {

constexpr int kMaxNodes = 12;

struct SmallGraph {
  int n = 0;
  std::array<std::uint16_t, kMaxNodes> adj{};

  bool has(int u, int v) const { return (adj[u] >> v) & 1U; }
  void add(int u, int v) {
    adj[u] |= static_cast<std::uint16_t>(1U << v);
    adj[v] |= static_cast<std::uint16_t>(1U << u);
  }
  void remove(int u, int v) {
    adj[u] &= static_cast<std::uint16_t>(~(1U << v));
    adj[v] &= static_cast<std::uint16_t>(~(1U << u));
  }
  int degree(int u) const { return std::popcount(adj[u]); }
  std::uint16_t all() const { return static_cast<std::uint16_t>((1U << n) - 1); }

  // Number of ordered pairs farther apart than max_diameter (or unreachable).
  int violations(int max_diameter) const {
    int bad = 0;
    for (int s = 0; s < n; ++s) {
      std::uint16_t reached = static_cast<std::uint16_t>(1U << s);
      std::uint16_t frontier = reached;
      for (int level = 0; level < max_diameter && frontier; ++level) {
        std::uint16_t next = 0;
        for (std::uint16_t f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
        frontier = next & static_cast<std::uint16_t>(~reached);
        reached |= next;
      }
      bad += n - std::popcount(reached);
    }
    return bad;
  }

  // Sum of BFS distances over ordered pairs; assumes connected.
  int total_distance() const {
    int total = 0;
    for (int s = 0; s < n; ++s) {
      std::uint16_t reached = static_cast<std::uint16_t>(1U << s);
      std::uint16_t frontier = reached;
      for (int level = 1; frontier; ++level) {
        std::uint16_t next = 0;
        for (std::uint16_t f = frontier; f; f &= f - 1) next |= adj[std::countr_zero(f)];
        frontier = next & static_cast<std::uint16_t>(~reached);
        reached |= next;
        total += level * std::popcount(frontier);
      }
    }
    return total;
  }

  Topology to_topology() const {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (has(u, v)) edges.emplace_back(u, v);
    TopologyParams p;
    p.kind = TopologyKind::kSynthesized;
    p.nodes = n;
    return Topology::from_edges(n, edges, p);
  }
};

// Fewest neighbors a node can have and still see all n-1 others within
// max_diameter hops when no node exceeds max_degree.
int min_degree_bound(int n, int max_degree, int max_diameter) {
  long long reach_per_neighbor = 0;
  long long layer = 1;
  for (int i = 0; i < max_diameter; ++i) {
    reach_per_neighbor += layer;
    layer *= std::max(max_degree - 1, 0);
    if (reach_per_neighbor > n) break;
  }
  if (reach_per_neighbor == 0) return n;
  return static_cast<int>((n - 1 + reach_per_neighbor - 1) / reach_per_neighbor);
}

struct Candidate {
  SmallGraph graph;
  int edges = std::numeric_limits<int>::max();
  int total_distance = std::numeric_limits<int>::max();
  bool found = false;

  void offer(const SmallGraph& g, int e) {
    int td = g.total_distance();
    if (!found || e < edges || (e == edges && td < total_distance)) {
      graph = g;
      edges = e;
      total_distance = td;
      found = true;
    }
  }
};

class LocalSearch {
 public:
  LocalSearch(const SynthesisRequest& req) : req_(req), rng_(req.seed) {}

  // Tries to find a feasible graph with exactly `m` edges.
  bool search_level(int m, Candidate& best) {
    const int n = req_.nodes;
    bool found = false;
    SmallGraph g;
    int cost = 0;
    int since_restart = 0;
    const int restart_every = std::max(200, 40 * n);
    for (int it = 0; it < req_.budget; ++it) {
      if (it == 0 || since_restart >= restart_every) {
        if (!random_graph(m, g)) return found;
        cost = g.violations(req_.max_diameter);
        since_restart = 0;
      }
      ++since_restart;
      if (cost == 0) {
        best.offer(g, m);
        found = true;
      }
      // Rewire: drop one edge, add one non-edge, keep if no worse.
      auto [a, b] = pick_edge(g);
      g.remove(a, b);
      int u = 0;
      int v = 0;
      if (!pick_non_edge(g, a, b, u, v)) {
        g.add(a, b);
        continue;
      }
      g.add(u, v);
      int next = g.violations(req_.max_diameter);
      bool accept = next < cost;
      if (!accept && next == cost) {
        if (cost == 0) {
          accept = g.total_distance() <= best.total_distance;
        } else {
          accept = true;
        }
      }
      if (accept) {
        cost = next;
      } else {
        g.remove(u, v);
        g.add(a, b);
      }
    }
    return found;
  }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  bool random_graph(int m, SmallGraph& g) {
    const int n = req_.nodes;
    for (int attempt = 0; attempt < 64; ++attempt) {
      g = SmallGraph{};
      g.n = n;
      std::vector<std::pair<int, int>> pairs;
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
      std::shuffle(pairs.begin(), pairs.end(), rng_);
      int e = 0;
      for (auto [u, v] : pairs) {
        if (e == m) break;
        if (g.degree(u) < req_.max_degree && g.degree(v) < req_.max_degree) {
          g.add(u, v);
          ++e;
        }
      }
      if (e == m) return true;
    }
    return false;
  }

  std::pair<int, int> pick_edge(const SmallGraph& g) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < g.n; ++u)
      for (int v = u + 1; v < g.n; ++v)
        if (g.has(u, v)) edges.emplace_back(u, v);
    return edges[uniform(0, static_cast<int>(edges.size()) - 1)];
  }

  bool pick_non_edge(const SmallGraph& g, int skip_u, int skip_v, int& u, int& v) {
    std::vector<std::pair<int, int>> options;
    for (int a = 0; a < g.n; ++a)
      for (int b = a + 1; b < g.n; ++b)
        if (!g.has(a, b) && !(a == skip_u && b == skip_v) && g.degree(a) < req_.max_degree &&
            g.degree(b) < req_.max_degree)
          options.emplace_back(a, b);
    if (options.empty()) return false;
    std::tie(u, v) = options[uniform(0, static_cast<int>(options.size()) - 1)];
    return true;
  }

  const SynthesisRequest& req_;
  std::mt19937_64 rng_;
};

// Enumerates every graph on n labeled nodes with degree <= max_degree.
class Exhaustive {
 public:
  Exhaustive(const SynthesisRequest& req, int min_degree) : req_(req), min_degree_(min_degree) {
    g_.n = req.nodes;
    for (int u = 0; u < g_.n; ++u)
      for (int v = u + 1; v < g_.n; ++v) pairs_.emplace_back(u, v);
  }

  Candidate run() {
    recurse(0, 0);
    return best_;
  }

 private:
  void recurse(std::size_t idx, int edges) {
    if (best_.found && edges > best_.edges) return;
    if (idx == pairs_.size()) {
      if (g_.violations(req_.max_diameter) == 0) best_.offer(g_, edges);
      return;
    }
    auto [u, v] = pairs_[idx];
    // Node u's degree is final once its last pair (u, n-1) is decided.
    auto row_done_ok = [&]() { return v != g_.n - 1 || g_.degree(u) >= min_degree_; };
    if (g_.degree(u) < req_.max_degree && g_.degree(v) < req_.max_degree) {
      g_.add(u, v);
      if (row_done_ok()) recurse(idx + 1, edges + 1);
      g_.remove(u, v);
    }
    if (row_done_ok()) recurse(idx + 1, edges);
  }

  const SynthesisRequest& req_;
  int min_degree_;
  SmallGraph g_;
  std::vector<std::pair<int, int>> pairs_;
  Candidate best_;
};

}  // namespace

Topology synthesize(const SynthesisRequest& req) {
  const int n = req.nodes;
  if (n < 4 || n > kMaxNodes) throw Error(ErrorCode::kInvalidParams, "synthesis supports 4..12 nodes");
  if (req.max_degree < 2) throw Error(ErrorCode::kInvalidParams, "max_degree must be at least 2");
  if (req.max_diameter < 1) throw Error(ErrorCode::kInvalidParams, "max_diameter must be at least 1");
  if (req.budget < 1) throw Error(ErrorCode::kInvalidParams, "budget must be positive");

  const int degree_cap = std::min(req.max_degree, n - 1);
  const int k_min = std::max(1, min_degree_bound(n, degree_cap, req.max_diameter));
  auto infeasible = [&](const std::string& why) {
    return Error(ErrorCode::kInfeasible, "n=" + std::to_string(n) + " degree<=" +
                                             std::to_string(req.max_degree) + " diameter<=" +
                                             std::to_string(req.max_diameter) + ": " + why);
  };
  if (k_min > degree_cap) throw infeasible("exceeds the Moore bound");

  SynthesisRequest capped = req;
  capped.max_degree = degree_cap;
  const int lower = std::max(n - 1, (n * k_min + 1) / 2);
  const int upper = n * degree_cap / 2;

  Candidate best;
  LocalSearch search(capped);
  for (int m = lower; m <= upper; ++m) {
    if (search.search_level(m, best)) return best.graph.to_topology();
  }
  if (n <= 8) {
    Candidate exact = Exhaustive(capped, k_min).run();
    if (exact.found) return exact.graph.to_topology();
    throw infeasible("no graph exists (exhaustive)");
  }
  throw infeasible("none found within budget");
}

}  // namespace noc
