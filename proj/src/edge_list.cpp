// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <istream>
#include <ostream>
#include <sstream>

#include "nocsim/error.hpp"
#include "nocsim/topology.hpp"

namespace noc {

void write_edge_list(std::ostream& out, const Topology& topology) {
  out << "nodes " << topology.node_count() << '\n';
  for (auto [u, v] : topology.undirected_edges()) out << u << ' ' << v << '\n';
}

std::string to_edge_list(const Topology& topology) {
  std::ostringstream os;
  write_edge_list(os, topology);
  return os.str();
}

Topology read_edge_list(std::istream& in) {
  std::string line;
  int line_no = 0;
  int nodes = -1;
  std::vector<std::pair<NodeId, NodeId>> edges;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kSyntaxError, "edge list line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (nodes < 0) {
      if (first != "nodes" || !(ls >> nodes) || nodes <= 0) fail("expected 'nodes N'");
    } else {
      NodeId u = 0;
      NodeId v = 0;
      std::istringstream fs(first);
      if (!(fs >> u) || !fs.eof() || !(ls >> v)) fail("expected 'u v'");
      edges.emplace_back(u, v);
    }
    std::string extra;
    if (ls >> extra) fail("trailing token '" + extra + "'");
  }
  if (nodes < 0) throw Error(ErrorCode::kSyntaxError, "edge list is empty");
  TopologyParams params;
  params.kind = TopologyKind::kCustom;
  params.nodes = nodes;
  return Topology::from_edges(nodes, edges, params);
}

Topology parse_edge_list(const std::string& text) {
  std::istringstream is(text);
  return read_edge_list(is);
}

}  // namespace noc
