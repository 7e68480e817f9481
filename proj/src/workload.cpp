// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocsim/workload.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "nocsim/error.hpp"

namespace noc {

std::string to_string(TrafficPattern p) {
  switch (p) {
    case TrafficPattern::kUniformRandom: return "uniform_random";
    case TrafficPattern::kTranspose: return "transpose";
    case TrafficPattern::kHotspot: return "hotspot";
    case TrafficPattern::kPermutationFile: return "permutation_file";
  }
  return "uniform_random";
}

std::optional<TrafficPattern> parse_traffic_pattern(const std::string& name) {
  for (auto p : {TrafficPattern::kUniformRandom, TrafficPattern::kTranspose, TrafficPattern::kHotspot,
                 TrafficPattern::kPermutationFile})
    if (to_string(p) == name) return p;
  return std::nullopt;
}

std::uint64_t CounterRng::mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::optional<int> uniform_other(const TrafficContext& ctx, int terminal, CounterRng& rng) {
  if (ctx.terminals < 2) return std::nullopt;
  for (int attempt = 0; attempt < 64; ++attempt) {
    int d = rng.next_below(ctx.terminals - 1);
    if (d >= terminal) ++d;
    if (!ctx.alive || ctx.alive(d)) return d;
  }
  return std::nullopt;
}

}  // namespace

std::optional<int> pick_destination(const TrafficSpec& spec, const TrafficContext& ctx, int terminal, CounterRng& rng) {
  std::optional<int> dst;
  switch (spec.pattern) {
    case TrafficPattern::kUniformRandom:
      return uniform_other(ctx, terminal, rng);
    case TrafficPattern::kTranspose: {
      const int x = terminal % ctx.grid_width;
      const int y = terminal / ctx.grid_width;
      dst = x * ctx.grid_width + y;
      break;
    }
    case TrafficPattern::kHotspot:
      if (rng.next_unit() < spec.hotspot_fraction) {
        dst = spec.hotspot;
      } else {
        return uniform_other(ctx, terminal, rng);
      }
      break;
    case TrafficPattern::kPermutationFile:
      if (terminal < static_cast<int>(spec.permutation.size()) && spec.permutation[terminal] >= 0)
        dst = spec.permutation[terminal];
      break;
  }
  if (!dst || *dst == terminal || (ctx.alive && !ctx.alive(*dst))) return std::nullopt;
  return dst;
}

std::optional<PacketDescriptor> inject(const TrafficSpec& spec, const TrafficContext& ctx, int terminal, Cycle cycle) {
  if (spec.injection_rate <= 0.0) return std::nullopt;
  CounterRng rng(spec.seed, static_cast<std::uint64_t>(terminal), static_cast<std::uint64_t>(cycle));
  if (rng.next_unit() >= spec.injection_rate / spec.packet_length) return std::nullopt;
  auto dst = pick_destination(spec, ctx, terminal, rng);
  if (!dst) return std::nullopt;
  return PacketDescriptor{terminal, *dst};
}

std::vector<int> parse_permutation(const std::string& text, int terminals) {
  std::vector<int> perm(terminals, -1);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int src = 0;
    int dst = 0;
    std::string extra;
    if (!(ls >> src)) continue;
    if (!(ls >> dst) || (ls >> extra))
      throw Error(ErrorCode::kSyntaxError, "permutation line " + std::to_string(line_no) + ": expected 'src dst'");
    if (src < 0 || dst < 0 || src >= terminals || dst >= terminals)
      throw Error(ErrorCode::kUnknownElement, "permutation line " + std::to_string(line_no) + ": terminal out of range");
    perm[src] = dst;
  }
  return perm;
}

// ---------------------------------------------------------------------------
// Faults
// ---------------------------------------------------------------------------

FaultSet faults_at(const FaultSchedule& schedule, const Topology& topology, Cycle cycle) {
  std::set<NodeId> nodes;
  std::set<LinkId> links;
  for (const FaultEvent& e : schedule.events) {
    if (cycle < e.down || (e.up && cycle >= *e.up)) continue;
    if (e.element == FaultEvent::Element::kLink) {
      links.insert(e.link);
    } else {
      nodes.insert(e.node);
      for (LinkId l : topology.out_links(e.node)) {
        links.insert(l);
        links.insert(topology.reverse(l));
      }
    }
  }
  return FaultSet{{nodes.begin(), nodes.end()}, {links.begin(), links.end()}};
}

std::vector<Cycle> fault_change_points(const FaultSchedule& schedule) {
  std::set<Cycle> points;
  for (const FaultEvent& e : schedule.events) {
    points.insert(e.down);
    if (e.up) points.insert(*e.up);
  }
  return {points.begin(), points.end()};
}

namespace {

struct Token {
  std::string text;
  int column = 0;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') ++i;
    tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return tokens;
}

}  // namespace

FaultSchedule parse_fault_schedule(const std::string& text, const Topology& topology) {
  FaultSchedule schedule;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    auto where = [&](const Token& t) { return "line " + std::to_string(line_no) + ":" + std::to_string(t.column); };
    auto number = [&](const Token& t) {
      long long v = 0;
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec != std::errc() || ptr != t.text.data() + t.text.size() || v < 0)
        throw Error(ErrorCode::kSyntaxError, where(t) + ": expected a non-negative integer, got '" + t.text + "'");
      return v;
    };
    FaultEvent e;
    std::size_t next = 0;
    if (tokens[0].text == "node") {
      if (tokens.size() != 4) throw Error(ErrorCode::kSyntaxError, where(tokens[0]) + ": expected 'node <id> <down> <up|inf>'");
      e.element = FaultEvent::Element::kNode;
      long long id = number(tokens[1]);
      if (id >= topology.node_count())
        throw Error(ErrorCode::kUnknownElement, where(tokens[1]) + ": no node " + tokens[1].text);
      e.node = static_cast<NodeId>(id);
      next = 2;
    } else if (tokens[0].text == "link") {
      if (tokens.size() != 5)
        throw Error(ErrorCode::kSyntaxError, where(tokens[0]) + ": expected 'link <u> <v> <down> <up|inf>'");
      e.element = FaultEvent::Element::kLink;
      long long u = number(tokens[1]);
      long long v = number(tokens[2]);
      std::optional<LinkId> l;
      if (u < topology.node_count() && v < topology.node_count())
        l = topology.find_link(static_cast<NodeId>(u), static_cast<NodeId>(v));
      if (!l) throw Error(ErrorCode::kUnknownElement, where(tokens[1]) + ": no link " + tokens[1].text + " " + tokens[2].text);
      e.link = *l;
      next = 3;
    } else {
      throw Error(ErrorCode::kSyntaxError, where(tokens[0]) + ": unknown element '" + tokens[0].text + "'");
    }
    e.down = number(tokens[next]);
    const Token& up = tokens[next + 1];
    if (up.text != "inf") {
      e.up = number(up);
      if (*e.up <= e.down)
        throw Error(ErrorCode::kInvertedInterval, where(up) + ": up cycle must be after down cycle");
    }
    schedule.events.push_back(e);
  }
  return schedule;
}

}  // namespace noc
