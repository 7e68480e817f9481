// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Tolerances are fixed here and are not
// configurable.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "nocsim/config.hpp"
#include "nocsim/engine.hpp"
#include "nocsim/routing.hpp"
#include "nocsim/sweep.hpp"
#include "nocsim/topology.hpp"
#include "oracles.hpp"

namespace {

using namespace noc;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Records the first mismatch, keeps counting the rest.
struct Tally {
  long checked = 0;
  long failed = 0;
  std::string first;

  void check(bool ok, const std::string& what) {
    ++checked;
    if (ok) return;
    if (failed++ == 0) first = what;
  }
};

// ---- 1: neighborhood routes equal the oracle --------------------------------

bool same_route_set(const TopologyView& view, NodeId a, NodeId b, const oracle::DistanceMatrix& d) {
  std::vector<Route> expect = oracle::all_shortest_paths_oracle(view, a, b, d);
  if (expect.size() > kDefaultRouteBudget) {
    try {
      neighborhood_routes(view, a, b);
      return false;
    } catch (const Error& e) {
      return e.code() == ErrorCode::kBudgetExceeded;
    }
  }
  std::vector<Route> got = neighborhood_routes(view, a, b);
  std::sort(got.begin(), got.end());
  return got == expect;
}

Outcome criterion_oracle_equivalence() {
  const auto t0 = Clock::now();
  Tally tally;
  std::mt19937_64 rng(2026);
  std::vector<Topology> graphs;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng() % 31);
    const int extra = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    graphs.push_back(oracle::random_connected_graph(n, extra, rng()));
  }
  for (int k = 3; k <= 6; ++k) graphs.push_back(generate(TopologyParams::mesh(k, k)));
  for (const Topology& t : graphs) {
    TopologyView view(t);
    auto d = oracle::floyd_warshall(view);
    for (NodeId a = 0; a < t.node_count(); ++a)
      for (NodeId b = 0; b < t.node_count(); ++b)
        tally.check(same_route_set(view, a, b, d), std::to_string(t.node_count()) + "-node graph " +
                                                       std::to_string(a) + "->" + std::to_string(b));
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = tally.failed == 0 && secs < 10.0;
  o.detail = std::to_string(graphs.size()) + " graphs, " + std::to_string(tally.checked) + " pairs, " +
             std::to_string(tally.failed) + " mismatches, " + fmt("%.2fs", secs);
  if (tally.failed) o.detail += ", first: " + tally.first;
  return o;
}

// ---- 2: zero-load latency closed forms ---------------------------------------

Outcome criterion_closed_form_latency() {
  Tally tally;
  for (Switching sw : {Switching::kStoreAndForward, Switching::kVirtualCutThrough, Switching::kWormhole})
    for (int F : {1, 4, 8})
      for (int P : {1, 2}) {
        SimConfig c;
        c.topology = TopologyParams::mesh(8, 8);
        c.fabric.switching = sw;
        c.fabric.pipeline = P;
        c.fabric.buffer_depth = F;
        c.traffic.packet_length = F;
        Simulation sim(c);
        const Topology& t = sim.topology();
        std::vector<std::pair<int, PacketId>> probes;
        for (int H = 1; H <= 10; ++H) {
          const int x = std::min(H, 7);
          probes.push_back({H, sim.inject_packet(0, t.grid_node(x, H - x))});
          // One packet in flight at a time keeps the network at zero load.
          while (!sim.quiescent()) sim.step();
        }
        for (auto [H, id] : probes) {
          const PacketRecord& p = sim.packet(id);
          const Cycle expect = sw == Switching::kStoreAndForward ? H * (F + P) : H * (1 + P) + (F - 1);
          const Cycle got = p.delivered - p.injected;
          tally.check(got == expect && p.hops == H, to_string(sw) + " H=" + std::to_string(H) + " F=" +
                                                        std::to_string(F) + " P=" + std::to_string(P) + " got " +
                                                        std::to_string(got) + " want " + std::to_string(expect));
        }
      }
  Outcome o;
  o.pass = tally.failed == 0;
  o.detail = std::to_string(tally.checked) + " cases, " + std::to_string(tally.failed) + " mismatches";
  if (tally.failed) o.detail += ", first: " + tally.first;
  return o;
}

// ---- 3: deadlock analysis ---------------------------------------------------

Outcome criterion_deadlock_analysis() {
  Topology mesh = generate(TopologyParams::mesh(8, 8));
  Topology torus = generate(TopologyParams::torus(8, 8));
  struct Case {
    const char* name;
    const Topology* topology;
    int vcs;
    std::function<RoutingRelation()> relation;
    bool expect_free;
  };
  const std::vector<Case> cases = {
      {"xy/mesh", &mesh, 1, [&] { return xy_relation(mesh, 1); }, true},
      {"dyxy/mesh", &mesh, 2, [&] { return dyxy_relation(mesh, 2); }, true},
      {"xy/torus vc=1", &torus, 1, [&] { return xy_relation(torus, 1); }, false},
      {"xy/torus vc=2 dateline", &torus, 2, [&] { return xy_relation(torus, 2); }, true},
  };
  Outcome o;
  for (const Case& c : cases) {
    const auto t0 = Clock::now();
    const bool free = is_deadlock_free(build_cdg(*c.topology, c.vcs, c.relation()));
    const double secs = seconds_since(t0);
    const bool ok = free == c.expect_free && secs < 1.0;
    o.pass = o.pass && ok;
    if (!o.detail.empty()) o.detail += ", ";
    o.detail += std::string(c.name) + (free ? " free" : " cyclic") + fmt(" %.3fs", secs);
  }
  return o;
}

// ---- 4: conservation and livelock across the matrix -------------------------

FaultSchedule random_link_faults(const Topology& t, int undirected, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto edges = t.undirected_edges();
  std::vector<LinkId> failed;
  FaultSchedule s;
  int cut = 0;
  for (int tries = 0; cut < undirected && tries < 10000; ++tries) {
    auto [u, v] = edges[rng() % edges.size()];
    const LinkId a = *t.find_link(u, v);
    const LinkId b = *t.find_link(v, u);
    if (std::find(failed.begin(), failed.end(), a) != failed.end()) continue;
    std::vector<LinkId> candidate = failed;
    candidate.push_back(a);
    candidate.push_back(b);
    if (!TopologyView(t, {}, candidate).is_connected()) continue;
    failed = std::move(candidate);
    for (LinkId l : {a, b}) {
      FaultEvent e;
      e.element = FaultEvent::Element::kLink;
      e.link = l;
      e.down = 0;
      s.events.push_back(e);
    }
    ++cut;
  }
  return s;
}

Outcome criterion_conservation() {
  struct Shape {
    const char* name;
    TopologyParams params;
    std::vector<Algorithm> algorithms;
  };
  const std::vector<Algorithm> general = {Algorithm::kGreedyFallback, Algorithm::kNeighborhood,
                                          Algorithm::kHierarchical};
  std::vector<Algorithm> mesh_algs = {Algorithm::kXy, Algorithm::kDyxy, Algorithm::kGreedy};
  mesh_algs.insert(mesh_algs.end(), general.begin(), general.end());
  std::vector<Algorithm> torus_algs = {Algorithm::kXy};
  torus_algs.insert(torus_algs.end(), general.begin(), general.end());
  const std::vector<Shape> shapes = {
      {"mesh8x8", TopologyParams::mesh(8, 8), mesh_algs},
      {"torus8x8", TopologyParams::torus(8, 8), torus_algs},
      {"circulant16", TopologyParams::circulant(16, {1, 4}), general},
      {"butterfly4x4c2", TopologyParams::flattened_butterfly(4, 4, 2), general},
  };
  Tally tally;
  long runs = 0;
  std::uint64_t livelock = 0;
  auto check_run = [&](const SimConfig& c, const std::string& label) {
    MetricsReport m = run(c);
    ++runs;
    livelock += m.livelock;
    const bool balanced = m.injected == m.delivered + m.dropped + m.residual;
    tally.check(m.conservation_ok && balanced && m.livelock == 0, label);
  };
  for (const Shape& s : shapes)
    for (Algorithm a : s.algorithms)
      for (Switching sw : {Switching::kStoreAndForward, Switching::kVirtualCutThrough, Switching::kWormhole})
        for (double rate : {0.05, 0.2}) {
          SimConfig c;
          c.topology = s.params;
          c.algorithm = a;
          c.fabric.switching = sw;
          c.traffic.injection_rate = rate;
          c.warmup = 300;
          c.measure = 2000;
          c.drain = 4000;
          c.debug_checks = true;
          check_run(c, std::string(s.name) + "/" + to_string(a) + "/" + to_string(sw) + fmt("/%.2f", rate));
        }
  // Permanent and transient faults, plus the wireless overlay.
  Topology mesh = generate(TopologyParams::mesh(8, 8));
  for (Algorithm a : {Algorithm::kXy, Algorithm::kGreedyFallback, Algorithm::kNeighborhood,
                      Algorithm::kHierarchical}) {
    SimConfig c;
    c.topology = TopologyParams::mesh(8, 8);
    c.algorithm = a;
    c.traffic.injection_rate = 0.1;
    c.warmup = 300;
    c.measure = 3000;
    c.drain = 4000;
    c.debug_checks = true;
    c.faults = random_link_faults(mesh, 6, 11);
    for (FaultEvent& e : c.faults.events) {
      e.down = 500;
      e.up = Cycle{2000};
    }
    FaultEvent node;
    node.node = 27;
    node.down = 800;
    c.faults.events.push_back(node);
    check_run(c, "faults/" + to_string(a));
  }
  {
    SimConfig c;
    c.topology = TopologyParams::mesh(8, 8);
    c.wireless.enabled = true;
    c.wireless.hubs = {18, 21, 42, 45};
    c.wireless.threshold = 4;
    c.traffic.injection_rate = 0.05;
    c.warmup = 300;
    c.measure = 3000;
    c.drain = 4000;
    c.debug_checks = true;
    check_run(c, "wireless/xy");
  }
  Outcome o;
  o.pass = tally.failed == 0;
  o.detail = std::to_string(runs) + " runs, " + std::to_string(tally.failed) + " violations, livelock " +
             std::to_string(livelock);
  if (tally.failed) o.detail += ", first: " + tally.first;
  return o;
}

// ---- 5: fault tolerance -----------------------------------------------------

Outcome criterion_fault_tolerance() {
  Topology mesh = generate(TopologyParams::mesh(8, 8));
  Outcome o;
  std::uint64_t worst_delivered = 10000;
  std::uint64_t worst_residual = 0;
  for (int trial = 0; trial < 5; ++trial) {
    FaultSchedule faults = random_link_faults(mesh, 10, 100 + static_cast<std::uint64_t>(trial));
    if (faults.events.size() != 20) return {false, "could not place 10 connected link failures"};
    for (Algorithm a : {Algorithm::kGreedyFallback, Algorithm::kNeighborhood}) {
      SimConfig c;
      c.topology = TopologyParams::mesh(8, 8);
      c.algorithm = a;
      c.faults = faults;
      c.traffic.injection_rate = 0.05;
      c.max_packets = 10000;
      c.seed = static_cast<std::uint64_t>(trial) + 1;
      c.warmup = 0;
      c.measure = 20000;
      c.drain = 20000;
      MetricsReport m = run(c);
      const bool ok = m.injected == 10000 && m.delivered == 10000 && m.residual == 0 && m.livelock == 0;
      o.pass = o.pass && ok;
      worst_delivered = std::min(worst_delivered, m.delivered);
      worst_residual = std::max(worst_residual, m.residual);
    }
  }
  o.detail = "5 fault sets x {greedy_fallback, neighborhood}: min delivered " + std::to_string(worst_delivered) +
             "/10000, max residual " + std::to_string(worst_residual);
  return o;
}

// ---- 6: greedy minimality and fallback --------------------------------------

Outcome criterion_greedy() {
  Tally tally;
  Topology mesh = generate(TopologyParams::mesh(4, 4));
  TopologyView view(mesh);
  CoordinateMap coords =
      assign_virtual_coordinates(mesh, {mesh.grid_node(0, 0), mesh.grid_node(3, 0), mesh.grid_node(0, 3)});
  for (NodeId a = 0; a < 16; ++a)
    for (NodeId b = 0; b < 16; ++b) {
      Route r = greedy_with_fallback(coords, view, a, b);
      tally.check(is_valid_route(view, r) && static_cast<int>(r.size()) - 1 == oracle::manhattan(mesh, a, b),
                  "mesh4x4 " + std::to_string(a) + "->" + std::to_string(b));
    }

  // 5x5 mesh with the middle column (2,1)..(2,3) down.
  Topology grid = generate(TopologyParams::mesh(5, 5));
  const std::vector<NodeId> wall = {grid.grid_node(2, 1), grid.grid_node(2, 2), grid.grid_node(2, 3)};
  TopologyView blocked(grid, wall, {});
  const NodeId src = grid.grid_node(1, 2);
  const NodeId dst = grid.grid_node(3, 2);
  const std::vector<NodeId> corners = {grid.grid_node(0, 0), grid.grid_node(4, 0), grid.grid_node(0, 4)};
  CoordinateMap gc = assign_virtual_coordinates(grid, corners);
  NodeId at = src;
  bool stalled = false;
  for (int step = 0; step < 25; ++step) {
    RoutingDecision d = next_hop_greedy(gc, Metric::kEuclidean, blocked, at, dst);
    if (d.kind != RoutingDecision::Kind::kForward) {
      stalled = d.kind == RoutingDecision::Kind::kLocalMinimum;
      break;
    }
    at = grid.neighbor(at, d.port);
  }
  tally.check(stalled, "obstacle: pure greedy did not stall");
  Route r = greedy_with_fallback(gc, blocked, src, dst);
  tally.check(is_valid_route(blocked, r) && r.front() == src && r.back() == dst, "obstacle: fallback route invalid");

  SimConfig c;
  c.topology = TopologyParams::mesh(5, 5);
  c.algorithm = Algorithm::kGreedyFallback;
  c.anchors = corners;
  for (NodeId n : wall) {
    FaultEvent e;
    e.node = n;
    e.down = 0;
    c.faults.events.push_back(e);
  }
  Simulation sim(c);
  sim.step();  // applies the faults
  PacketId id = sim.inject_packet(src, dst);
  for (int i = 0; i < 1000 && !sim.quiescent(); ++i) sim.step();
  const PacketRecord& p = sim.packet(id);
  tally.check(p.fallback && p.flits_delivered == p.length && !p.dropped, "obstacle: engine did not deliver");

  Outcome o;
  o.pass = tally.failed == 0;
  o.detail = "256 mesh pairs + obstacle case, " + std::to_string(tally.failed) + " failures" +
             ", obstacle route " + std::to_string(r.size() - 1) + " hops";
  if (tally.failed) o.detail += ", first: " + tally.first;
  return o;
}

// ---- 7: saturation bound ----------------------------------------------------

std::vector<double> fine_grid(double top) {
  std::vector<double> g{0.01};
  for (int i = 2; i <= static_cast<int>(top * 100 + 0.5); ++i) g.push_back(i / 100.0);
  return g;
}

Outcome criterion_saturation() {
  SimConfig c;
  c.topology = TopologyParams::mesh(8, 8);
  c.algorithm = Algorithm::kXy;
  c.fabric.switching = Switching::kWormhole;
  SaturationResult r = measure_saturation(c, fine_grid(0.40));
  Outcome o;
  o.pass = r.saturated && r.rate >= 0.15 && r.rate <= 0.25;
  o.detail = fmt("saturation %.2f flits/node/cycle (zero-load %.2f cycles), required [0.15, 0.25]", r.rate,
                 r.zero_load_latency);
  if (!r.saturated) o.detail += ", unsaturated";
  return o;
}

// ---- 8: DyXY versus XY under transpose --------------------------------------

Outcome criterion_dyxy() {
  SimConfig c;
  c.topology = TopologyParams::mesh(8, 8);
  c.traffic.pattern = TrafficPattern::kTranspose;
  SaturationResult sat = measure_saturation(c, fine_grid(0.40));
  const double rate = 0.8 * sat.rate;
  double xy = 0.0;
  double dyxy = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    c.seed = seed;
    c.traffic.injection_rate = rate;
    c.algorithm = Algorithm::kXy;
    xy += run(c).avg_latency / 5.0;
    c.algorithm = Algorithm::kDyxy;
    dyxy += run(c).avg_latency / 5.0;
  }
  Outcome o;
  o.pass = dyxy <= xy;
  o.detail = fmt("rate %.3f: dyxy %.2f vs xy %.2f cycles", rate, dyxy, xy);
  return o;
}

// ---- 9: wireless shortcuts --------------------------------------------------

Outcome criterion_wireless() {
  SimConfig c;
  c.topology = TopologyParams::mesh(16, 16);
  Topology t = build_topology(c);
  // Corner-to-corner: every node sends to its point reflection.
  c.traffic.pattern = TrafficPattern::kPermutationFile;
  c.traffic.permutation.resize(256);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) c.traffic.permutation[t.grid_node(x, y)] = t.grid_node(15 - x, 15 - y);
  c.traffic.injection_rate = 0.02;
  MetricsReport wired = run(c);
  c.wireless.enabled = true;
  c.wireless.hubs = {t.grid_node(4, 4), t.grid_node(11, 4), t.grid_node(4, 11), t.grid_node(11, 11)};
  c.wireless.threshold = 8;
  MetricsReport wireless = run(c);
  Outcome o;
  o.pass = wireless.avg_latency < wired.avg_latency && wireless.max_transmitters <= 1 && wireless.conservation_ok;
  o.detail = fmt("wireless %.2f vs wired %.2f cycles", wireless.avg_latency, wired.avg_latency) +
             fmt(", air share %.3f, max transmitters %.0f", wireless.wireless_share, wireless.max_transmitters);
  return o;
}

// ---- 10: topology synthesis -------------------------------------------------

Outcome criterion_synthesis() {
  Outcome o;
  auto optimum = oracle::min_edges_exhaustive(6, 3, 2);
  Topology six = synthesize({6, 3, 2, 1, 20000});
  TopologyScore s6 = score(six);
  const bool six_ok = optimum && s6.edge_count == optimum->edges && s6.max_degree <= 3 && s6.diameter <= 2;
  Topology k4 = synthesize({4, 3, 1, 1, 20000});
  TopologyScore s4 = score(k4);
  const bool k4_ok = s4.edge_count == 6 && s4.diameter == 1;
  bool infeasible = false;
  try {
    synthesize({10, 2, 2, 1, 20000});
  } catch (const Error& e) {
    infeasible = e.code() == ErrorCode::kInfeasible;
  }
  o.pass = six_ok && k4_ok && infeasible;
  o.detail = "n=6: " + std::to_string(s6.edge_count) + " edges (optimum " +
             (optimum ? std::to_string(optimum->edges) : std::string("none")) + "), K4 " + (k4_ok ? "ok" : "wrong") +
             ", n=10 deg 2 diam 2 " + (infeasible ? "infeasible" : "not reported");
  return o;
}

// ---- 11: determinism and golden files ---------------------------------------

Outcome criterion_determinism() {
  const fs::path data = NOCSIM_TEST_DATA;
  const fs::path scratch = fs::temp_directory_path() / ("nocsim_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(scratch);
  Outcome o;
  int golden = 0;
  for (const char* name : {"mesh_xy", "torus_xy", "faults_mesh", "wireless_mesh"}) {
    ExperimentConfig x = load_config(data / "golden" / (std::string(name) + ".cfg"));
    const fs::path a = scratch / name / "a";
    const fs::path b = scratch / name / "b";
    run_sweep(x, a, 1);
    run_sweep(x, b, 0);
    for (const char* f : {"sweep.csv", "summary.csv"}) {
      const std::string first = read_file(a / f);
      if (first != read_file(b / f)) {
        o.pass = false;
        o.detail += std::string(name) + "/" + f + " differs between runs; ";
      }
      if (first != read_file(data / "golden" / name / f)) {
        o.pass = false;
        o.detail += std::string(name) + "/" + f + " differs from golden; ";
      }
    }
    ++golden;
  }
  fs::remove_all(scratch);
  if (o.pass) o.detail = std::to_string(golden) + " golden configs, reruns byte-identical";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {"oracle equivalence", criterion_oracle_equivalence},
      {"closed-form latency", criterion_closed_form_latency},
      {"deadlock analysis", criterion_deadlock_analysis},
      {"conservation and livelock", criterion_conservation},
      {"fault tolerance", criterion_fault_tolerance},
      {"greedy minimality and fallback", criterion_greedy},
      {"saturation bound", criterion_saturation},
      {"dyxy under transpose", criterion_dyxy},
      {"wireless shortcuts", criterion_wireless},
      {"topology synthesis", criterion_synthesis},
      {"determinism", criterion_determinism},
  };
  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %-32s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
