// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: run, sweep, routes, coords, check-deadlock,
// synth, score.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "nocsim/config.hpp"
#include "nocsim/error.hpp"
#include "nocsim/routing.hpp"
#include "nocsim/sweep.hpp"
#include "nocsim/topology.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitSimulation = 2;

struct Common {
  std::string config;
  std::string topology;
  std::string out;
  std::optional<std::uint64_t> seed;
};

noc::ExperimentConfig experiment(const Common& o) {
  if (o.config.empty()) throw noc::Error(noc::ErrorCode::kMissingRequired, "--config is required");
  auto x = noc::load_config(o.config);
  if (o.seed) {
    x.sim.seed = *o.seed;
    x.seeds = {*o.seed};
  }
  return x;
}

// Analysis commands accept an edge list or a config.
noc::Topology analysis_topology(const Common& o) {
  if (!o.topology.empty()) return noc::parse_edge_list(noc::read_file(o.topology));
  if (!o.config.empty()) return noc::build_topology(noc::load_config(o.config).sim);
  throw noc::Error(noc::ErrorCode::kMissingRequired, "--topology or --config is required");
}

void emit(const Common& o, const std::string& file, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::create_directories(o.out);
  std::ofstream out(std::filesystem::path(o.out) / file, std::ios::binary);
  if (!out) throw noc::Error(noc::ErrorCode::kIoError, "cannot write into " + o.out);
  out << text;
}

std::vector<noc::NodeId> parse_ids(const std::string& text) {
  std::vector<noc::NodeId> ids;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      ids.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw noc::Error(noc::ErrorCode::kTypeMismatch, "expected a comma-separated id list, got '" + text + "'");
    }
  }
  return ids;
}

bool check_deadlock(const noc::Topology& topo, noc::Algorithm algorithm, int vc_count,
                    const std::vector<noc::NodeId>& anchors, const std::vector<noc::NodeId>& centers) {
  using noc::Algorithm;
  const int n = topo.node_count();
  switch (algorithm) {
    case Algorithm::kXy:
      return noc::is_deadlock_free(noc::build_cdg(topo, vc_count, noc::xy_relation(topo, vc_count)));
    case Algorithm::kDyxy:
      return noc::is_deadlock_free(noc::build_cdg(topo, vc_count, noc::dyxy_relation(topo, vc_count)));
    case Algorithm::kGreedy: {
      auto coords = noc::assign_virtual_coordinates(topo, anchors.empty() ? noc::default_anchors(topo, std::min(3, n)) : anchors);
      return noc::is_deadlock_free(noc::build_cdg(topo, 1, noc::greedy_relation(topo, coords, noc::Metric::kEuclidean)));
    }
    default:
      break;
  }
  noc::TopologyView view(topo);
  std::vector<noc::Route> routes;
  std::optional<noc::CoordinateMap> coords;
  std::optional<noc::AddressMap> trees;
  if (algorithm == Algorithm::kGreedyFallback)
    coords = noc::assign_virtual_coordinates(topo, anchors.empty() ? noc::default_anchors(topo, std::min(3, n)) : anchors);
  if (algorithm == Algorithm::kHierarchical)
    trees = noc::assign_hierarchical_addresses(topo, centers.empty() ? noc::default_anchors(topo, std::min(2, n)) : centers);
  for (noc::NodeId s = 0; s < n; ++s) {
    const auto labels = noc::neighborhood_labels(view, s);
    for (noc::NodeId d = 0; d < n; ++d) {
      if (s == d) continue;
      if (algorithm == Algorithm::kNeighborhood) {
        routes.push_back(noc::first_neighborhood_route(view, labels, d));
      } else if (algorithm == Algorithm::kGreedyFallback) {
        routes.push_back(noc::greedy_with_fallback(*coords, view, s, d));
      } else {
        routes.push_back(noc::hierarchical_route(*trees, s, d));
      }
    }
  }
  return noc::is_deadlock_free(noc::build_cdg_from_routes(topo, routes));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nocsim: cycle-accurate network-on-chip simulator"};
  app.require_subcommand(1);
  Common o;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "Config file (flat dotted keys)");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--seed", o.seed, "Seed, overrides the config");
    cmd->add_option("--topology", o.topology, "Edge-list topology file");
  };

  auto* run = app.add_subcommand("run", "Run one simulation and print its metrics");
  add_common(run);

  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Run the sweep axes and write sweep.csv and summary.csv");
  add_common(sweep);
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");

  int src = 0;
  int dst = 0;
  std::size_t budget = noc::kDefaultRouteBudget;
  auto* routes = app.add_subcommand("routes", "List every shortest route between two nodes");
  add_common(routes);
  routes->add_option("--src", src, "Source node")->required();
  routes->add_option("--dst", dst, "Destination node")->required();
  routes->add_option("--budget", budget, "Maximum number of routes");

  std::string anchors_text;
  int anchor_count = 3;
  auto* coords = app.add_subcommand("coords", "Print virtual coordinates");
  add_common(coords);
  coords->add_option("--anchors", anchors_text, "Comma-separated anchor ids");
  coords->add_option("--anchor-count", anchor_count, "Number of farthest-point anchors");

  std::string algorithm_name;
  std::optional<int> vc_count;
  auto* check = app.add_subcommand("check-deadlock", "Channel dependency analysis of a routing function");
  add_common(check);
  check->add_option("--algorithm", algorithm_name, "Routing algorithm (defaults to the config's)");
  check->add_option("--vc", vc_count, "Virtual channels per link");

  noc::SynthesisRequest req;
  auto* synth = app.add_subcommand("synth", "Synthesize a topology with the fewest links");
  add_common(synth);
  synth->add_option("--nodes", req.nodes, "Node count")->required();
  synth->add_option("--degree", req.max_degree, "Maximum degree")->required();
  synth->add_option("--diameter", req.max_diameter, "Maximum diameter")->required();
  synth->add_option("--budget", req.budget, "Search iterations per edge count");

  auto* score = app.add_subcommand("score", "Diameter, average distance, degree and links of a topology");
  add_common(score);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      auto x = experiment(o);
      auto report = noc::run(x.sim);
      emit(o, "report.txt", report.serialize());
      return report.deadlock || report.livelock > 0 ? kExitSimulation : 0;
    }
    if (*sweep) {
      auto x = experiment(o);
      noc::run_sweep(x, o.out.empty() ? std::filesystem::path(x.out_dir) : std::filesystem::path(o.out), threads);
      return 0;
    }
    if (*routes) {
      auto topo = analysis_topology(o);
      if (src < 0 || dst < 0 || src >= topo.node_count() || dst >= topo.node_count())
        throw noc::Error(noc::ErrorCode::kInvalidParams, "--src/--dst out of range");
      std::string text;
      auto found = noc::neighborhood_routes(noc::TopologyView(topo), src, dst, budget);
      std::sort(found.begin(), found.end());
      for (const auto& r : found) {
        for (std::size_t i = 0; i < r.size(); ++i) text += (i ? " " : "") + std::to_string(r[i]);
        text += "\n";
      }
      emit(o, "routes.txt", text);
      return 0;
    }
    if (*coords) {
      auto topo = analysis_topology(o);
      auto anchors = anchors_text.empty() ? noc::default_anchors(topo, std::min(anchor_count, topo.node_count()))
                                          : parse_ids(anchors_text);
      emit(o, "coords.txt", noc::to_string(noc::assign_virtual_coordinates(topo, anchors)));
      return 0;
    }
    if (*check) {
      noc::Algorithm algorithm = noc::Algorithm::kXy;
      int vcs = 1;
      std::vector<noc::NodeId> anchors;
      std::vector<noc::NodeId> centers;
      noc::Topology topo;
      if (!o.config.empty() && o.topology.empty()) {
        auto x = noc::load_config(o.config);
        topo = noc::build_topology(x.sim);
        algorithm = x.sim.algorithm;
        vcs = noc::effective_vc_count(x.sim);
        anchors = x.sim.anchors;
        centers = x.sim.centers;
      } else {
        topo = analysis_topology(o);
      }
      if (!algorithm_name.empty()) {
        auto a = noc::parse_algorithm(algorithm_name);
        if (!a) throw noc::Error(noc::ErrorCode::kTypeMismatch, "unknown algorithm '" + algorithm_name + "'");
        algorithm = *a;
      }
      if (vc_count) vcs = *vc_count;
      if ((algorithm == noc::Algorithm::kXy && !topo.is_grid()) ||
          (algorithm == noc::Algorithm::kDyxy && topo.kind() != noc::TopologyKind::kMesh))
        throw noc::Error(noc::ErrorCode::kConfigError, noc::to_string(algorithm) + " does not fit this topology");
      const bool free = check_deadlock(topo, algorithm, vcs, anchors, centers);
      emit(o, "deadlock.txt", std::string("deadlock-free: ") + (free ? "true" : "false") + "\n");
      return 0;
    }
    if (*synth) {
      if (o.seed) req.seed = *o.seed;
      emit(o, "topology.txt", noc::to_edge_list(noc::synthesize(req)));
      return 0;
    }
    if (*score) {
      auto s = noc::score(analysis_topology(o));
      char buf[256];
      std::snprintf(buf, sizeof buf, "diameter=%d\navg_distance=%.6f\nmax_degree=%d\nedge_count=%d\n", s.diameter,
                    s.avg_distance, s.max_degree, s.edge_count);
      emit(o, "score.txt", buf);
      return 0;
    }
  } catch (const noc::Error& e) {
    std::cerr << "nocsim: " << e.what() << "\n";
    switch (e.code()) {
      case noc::ErrorCode::kLivelockDetected:
      case noc::ErrorCode::kDeadlockDetected:
      case noc::ErrorCode::kProtocolViolation:
        return kExitSimulation;
      default:
        return kExitConfig;
    }
  } catch (const std::exception& e) {
    std::cerr << "nocsim: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
