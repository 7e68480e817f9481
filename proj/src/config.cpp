// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "nocsim/error.hpp"

namespace noc {

namespace {

const std::vector<std::string> kKeys = {
    "buffer_depth",
    "faults.file",
    "output.dir",
    "pipeline",
    "routing.algorithm",
    "routing.anchor_count",
    "routing.anchors",
    "routing.budget",
    "routing.centers",
    "routing.metric",
    "seed",
    "sim.debug",
    "sim.drain",
    "sim.measure",
    "sim.test_mode",
    "sim.warmup",
    "sweep.algorithms",
    "sweep.rates",
    "sweep.seeds",
    "switching",
    "topology.cols",
    "topology.concentration",
    "topology.file",
    "topology.generators",
    "topology.height",
    "topology.kind",
    "topology.nodes",
    "topology.rows",
    "topology.width",
    "traffic.hotspot",
    "traffic.hotspot_fraction",
    "traffic.max_packets",
    "traffic.packet_length",
    "traffic.pattern",
    "traffic.permutation_file",
    "traffic.rate",
    "vc_count",
    "wireless.enabled",
    "wireless.hubs",
    "wireless.queue_cap",
    "wireless.threshold",
    "wireless.w_cycles",
};

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;  // of the value
};

std::string trim(const std::string& s, std::size_t& lead) {
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  std::size_t e = s.size();
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  lead = b;
  return s.substr(b, e - b);
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const Entry& at(const std::string& key) const { return entries_.at(key); }

  [[noreturn]] void mismatch(const std::string& key, const std::string& expected) const {
    const Entry& e = at(key);
    throw Error(ErrorCode::kTypeMismatch, "line " + std::to_string(e.line) + ":" + std::to_string(e.column) + ": " +
                                              key + " expects " + expected + ", got '" + e.value + "'");
  }

  template <typename T>
  static bool parse_number(const std::string& s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
  }

  static bool parse_real(const std::string& s, double& out) {
    if (s.empty()) return false;
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    in >> out;
    return in && in.peek() == std::char_traits<char>::eof();
  }

  template <typename T>
  void integer(const std::string& key, T& out) const {
    if (!has(key)) return;
    if (!parse_number(at(key).value, out)) mismatch(key, "an integer");
  }

  void real(const std::string& key, double& out) const {
    if (!has(key)) return;
    if (!parse_real(at(key).value, out)) mismatch(key, "a number");
  }

  void boolean(const std::string& key, bool& out) const {
    if (!has(key)) return;
    const std::string& v = at(key).value;
    if (v == "true" || v == "1") {
      out = true;
    } else if (v == "false" || v == "0") {
      out = false;
    } else {
      mismatch(key, "true or false");
    }
  }

  void string(const std::string& key, std::string& out) const {
    if (has(key)) out = at(key).value;
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> items;
    std::stringstream in(at(key).value);
    std::string item;
    while (std::getline(in, item, ',')) {
      std::size_t lead = 0;
      item = trim(item, lead);
      if (item.empty()) mismatch(key, "a comma-separated list");
      items.push_back(item);
    }
    if (items.empty()) mismatch(key, "a non-empty list");
    return items;
  }

  template <typename T>
  void integer_list(const std::string& key, std::vector<T>& out) const {
    if (!has(key)) return;
    out.clear();
    for (const std::string& item : list(key)) {
      T v{};
      if (!parse_number(item, v)) mismatch(key, "a list of integers");
      out.push_back(v);
    }
  }

  void real_list(const std::string& key, std::vector<double>& out) const {
    if (!has(key)) return;
    out.clear();
    for (const std::string& item : list(key)) {
      double v = 0.0;
      if (!parse_real(item, v)) mismatch(key, "a list of numbers");
      out.push_back(v);
    }
  }

 private:
  std::map<std::string, Entry> entries_;
};

std::map<std::string, Entry> tokenize(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::size_t lead = 0;
    if (trim(line, lead).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::kSyntaxError,
                  "line " + std::to_string(line_no) + ":" + std::to_string(lead + 1) + ": expected 'key = value'");
    std::size_t key_lead = 0;
    const std::string key = trim(line.substr(0, eq), key_lead);
    if (key.empty())
      throw Error(ErrorCode::kSyntaxError, "line " + std::to_string(line_no) + ":" + std::to_string(eq + 1) + ": missing key");
    for (std::size_t i = 0; i < key.size(); ++i) {
      const char c = key[i];
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'))
        throw Error(ErrorCode::kSyntaxError, "line " + std::to_string(line_no) + ":" +
                                                 std::to_string(key_lead + i + 1) + ": bad character in key");
    }
    std::size_t value_lead = 0;
    const std::string value = trim(line.substr(eq + 1), value_lead);
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw Error(ErrorCode::kUnknownKey, "line " + std::to_string(line_no) + ":" + std::to_string(key_lead + 1) +
                                              ": unknown key '" + key + "'");
    if (entries.count(key))
      throw Error(ErrorCode::kSyntaxError, "line " + std::to_string(line_no) + ":" + std::to_string(key_lead + 1) +
                                               ": duplicate key '" + key + "'");
    entries[key] = Entry{value, line_no, static_cast<int>(eq + 1 + value_lead + 1)};
  }
  return entries;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& file) {
  std::filesystem::path p(file);
  return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

std::vector<std::string> config_keys() { return kKeys; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  Reader r(tokenize(text));
  ExperimentConfig x;
  SimConfig& c = x.sim;

  for (const char* key : {"topology.kind", "routing.algorithm"})
    if (!r.has(key)) throw Error(ErrorCode::kMissingRequired, std::string("missing required key ") + key);

  // topology
  const std::string kind_name = r.at("topology.kind").value;
  auto kind = parse_topology_kind(kind_name);
  if (!kind || *kind == TopologyKind::kSynthesized) r.mismatch("topology.kind", "mesh, torus, circulant, flattened_butterfly or custom");
  TopologyParams& tp = c.topology;
  tp.kind = *kind;
  r.integer("topology.width", tp.width);
  r.integer("topology.height", tp.height);
  r.integer("topology.nodes", tp.nodes);
  r.integer_list("topology.generators", tp.generators);
  r.integer("topology.rows", tp.rows);
  r.integer("topology.cols", tp.cols);
  r.integer("topology.concentration", tp.concentration);
  if (*kind == TopologyKind::kCustom) {
    if (!r.has("topology.file")) throw Error(ErrorCode::kMissingRequired, "topology.kind=custom needs topology.file");
    c.custom_topology = parse_edge_list(read_file(resolve(base_dir, r.at("topology.file").value)));
  } else if (r.has("topology.file")) {
    throw Error(ErrorCode::kConfigError, "topology.file needs topology.kind=custom");
  }

  // routing
  auto algorithm = parse_algorithm(r.at("routing.algorithm").value);
  if (!algorithm) r.mismatch("routing.algorithm", "xy, dyxy, greedy, greedy_fallback, neighborhood or hierarchical");
  c.algorithm = *algorithm;
  if (r.has("routing.metric")) {
    const std::string& m = r.at("routing.metric").value;
    if (m == "euclidean") {
      c.metric = Metric::kEuclidean;
    } else if (m == "l1") {
      c.metric = Metric::kL1;
    } else {
      r.mismatch("routing.metric", "euclidean or l1");
    }
  }
  r.integer("routing.anchor_count", c.anchor_count);
  r.integer_list("routing.anchors", c.anchors);
  r.integer_list("routing.centers", c.centers);
  r.integer("routing.budget", x.route_budget);

  // fabric
  r.integer("buffer_depth", c.fabric.buffer_depth);
  if (r.has("vc_count")) {
    r.integer("vc_count", c.fabric.vc_count);
    c.vc_count_explicit = true;
  }
  r.integer("pipeline", c.fabric.pipeline);
  if (r.has("switching")) {
    auto s = parse_switching(r.at("switching").value);
    if (!s) r.mismatch("switching", "saf, vct or wormhole");
    c.fabric.switching = *s;
  }

  // traffic
  if (r.has("traffic.pattern")) {
    auto p = parse_traffic_pattern(r.at("traffic.pattern").value);
    if (!p) r.mismatch("traffic.pattern", "uniform_random, transpose, hotspot or permutation_file");
    c.traffic.pattern = *p;
  }
  r.real("traffic.rate", c.traffic.injection_rate);
  r.integer("traffic.hotspot", c.traffic.hotspot);
  r.real("traffic.hotspot_fraction", c.traffic.hotspot_fraction);
  r.integer("traffic.packet_length", c.traffic.packet_length);
  r.integer("traffic.max_packets", c.max_packets);

  // wireless
  r.boolean("wireless.enabled", c.wireless.enabled);
  r.integer_list("wireless.hubs", c.wireless.hubs);
  r.integer("wireless.threshold", c.wireless.threshold);
  r.integer("wireless.w_cycles", c.wireless.w_cycles);
  r.integer("wireless.queue_cap", c.wireless.queue_cap);

  // simulation
  r.integer("sim.warmup", c.warmup);
  r.integer("sim.measure", c.measure);
  r.integer("sim.drain", c.drain);
  r.boolean("sim.test_mode", c.test_mode);
  r.boolean("sim.debug", c.debug_checks);
  r.integer("seed", c.seed);
  r.string("output.dir", x.out_dir);

  // sweep axes
  x.rates = {c.traffic.injection_rate};
  x.seeds = {c.seed};
  x.algorithms = {c.algorithm};
  r.real_list("sweep.rates", x.rates);
  r.integer_list("sweep.seeds", x.seeds);
  if (r.has("sweep.algorithms")) {
    x.algorithms.clear();
    for (const std::string& name : r.list("sweep.algorithms")) {
      auto a = parse_algorithm(name);
      if (!a) r.mismatch("sweep.algorithms", "a list of routing algorithms");
      x.algorithms.push_back(*a);
    }
  }

  // Files that need the topology.
  Topology topo = build_topology(c);
  const int terminals = topo.node_count() * topo.concentration();
  if (r.has("traffic.permutation_file"))
    c.traffic.permutation =
        parse_permutation(read_file(resolve(base_dir, r.at("traffic.permutation_file").value)), terminals);
  if (r.has("faults.file")) c.faults = parse_fault_schedule(read_file(resolve(base_dir, r.at("faults.file").value)), topo);

  for (double rate : x.rates)
    if (rate < 0.0 || rate > 1.0) throw Error(ErrorCode::kConfigError, "sweep.rates must lie in [0,1]");
  for (Algorithm a : x.algorithms) {
    SimConfig probe = c;
    probe.algorithm = a;
    validate(probe, topo);
  }
  return x;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

}  // namespace noc
