// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocsim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "nocsim/error.hpp"
#include "nocsim/routing.hpp"

namespace noc {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kXy: return "xy";
    case Algorithm::kDyxy: return "dyxy";
    case Algorithm::kGreedy: return "greedy";
    case Algorithm::kGreedyFallback: return "greedy_fallback";
    case Algorithm::kNeighborhood: return "neighborhood";
    case Algorithm::kHierarchical: return "hierarchical";
  }
  return "xy";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  for (auto a : {Algorithm::kXy, Algorithm::kDyxy, Algorithm::kGreedy, Algorithm::kGreedyFallback,
                 Algorithm::kNeighborhood, Algorithm::kHierarchical})
    if (to_string(a) == name) return a;
  return std::nullopt;
}

Topology build_topology(const SimConfig& config) {
  if (config.custom_topology) return *config.custom_topology;
  try {
    return generate(config.topology);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
}

int effective_vc_count(const SimConfig& config) {
  if (config.vc_count_explicit) return config.fabric.vc_count;
  const bool torus = !config.custom_topology && config.topology.kind == TopologyKind::kTorus;
  if (torus || config.algorithm == Algorithm::kDyxy) return 2;
  return 1;
}

void validate(const SimConfig& c, const Topology& t) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigError, what); };
  if ((c.algorithm == Algorithm::kXy) && !t.is_grid()) fail("routing.algorithm=xy needs a mesh or torus topology");
  if (c.algorithm == Algorithm::kDyxy && t.kind() != TopologyKind::kMesh)
    fail("routing.algorithm=dyxy needs a mesh topology");
  if (c.fabric.buffer_depth < 1) fail("buffer_depth must be positive");
  if (effective_vc_count(c) < 1 || effective_vc_count(c) > 32) fail("vc_count must be in 1..32");
  if (c.fabric.pipeline < 0) fail("pipeline must be non-negative");
  if (c.traffic.packet_length < 1) fail("traffic.packet_length must be positive");
  if (c.fabric.switching != Switching::kWormhole && c.fabric.buffer_depth < c.traffic.packet_length)
    fail("saf/vct need buffer_depth >= traffic.packet_length");
  if (c.traffic.injection_rate < 0.0 || c.traffic.injection_rate > 1.0) fail("traffic.rate must be in [0,1]");
  if (c.traffic.hotspot_fraction < 0.0 || c.traffic.hotspot_fraction > 1.0)
    fail("traffic.hotspot_fraction must be in [0,1]");
  const int terminals = t.node_count() * t.concentration();
  if (c.traffic.pattern == TrafficPattern::kHotspot && (c.traffic.hotspot < 0 || c.traffic.hotspot >= terminals))
    fail("traffic.hotspot is not a terminal");
  if (c.traffic.pattern == TrafficPattern::kTranspose &&
      (!t.is_grid() || t.params().width != t.params().height))
    fail("transpose traffic needs a square mesh or torus");
  if (c.traffic.pattern == TrafficPattern::kPermutationFile &&
      static_cast<int>(c.traffic.permutation.size()) != terminals)
    fail("permutation_file traffic needs traffic.permutation_file");
  if (c.warmup < 0 || c.measure <= 0 || c.drain < 0) fail("cycle windows must be positive");
  for (NodeId a : c.anchors)
    if (a < 0 || a >= t.node_count()) fail("anchor " + std::to_string(a) + " is not a node");
  for (NodeId a : c.centers)
    if (a < 0 || a >= t.node_count()) fail("center " + std::to_string(a) + " is not a node");
  if (c.wireless.enabled) {
    if (c.wireless.hubs.size() < 2) fail("wireless.enabled needs at least two wireless.hubs");
    std::set<NodeId> seen;
    for (NodeId h : c.wireless.hubs)
      if (h < 0 || h >= t.node_count() || !seen.insert(h).second) fail("bad wireless hub " + std::to_string(h));
    if (c.wireless.w_cycles < 1) fail("wireless.w_cycles must be positive");
    if (c.wireless.queue_cap < 0) fail("wireless.queue_cap must be non-negative");
  }
  for (const FaultEvent& e : c.faults.events) {
    if (e.element == FaultEvent::Element::kNode ? (e.node < 0 || e.node >= t.node_count())
                                                : (e.link < 0 || e.link >= t.link_count()))
      fail("fault schedule names an unknown element");
  }
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string MetricsReport::serialize() const {
  std::ostringstream os;
  os << "delivered=" << delivered << '\n'
     << "dropped=" << dropped << '\n'
     << "avg_latency=" << fixed6(avg_latency) << '\n'
     << "p99_latency=" << fixed6(p99_latency) << '\n'
     << "throughput=" << fixed6(throughput) << '\n'
     << "wireless_share=" << fixed6(wireless_share) << '\n'
     << "livelock=" << livelock << '\n'
     << "deadlock=" << (deadlock ? 1 : 0) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct Simulation::Impl {
  SimConfig config;
  Topology topo;
  TopologyView view;
  std::uint64_t epoch = 0;
  std::vector<Cycle> change_points;
  std::size_t next_change = 0;

  int vc_count = 1;
  int conc = 1;
  int terminals = 0;
  int diameter = 0;
  std::vector<int> dist;  // all-pairs, fault-free
  std::vector<Router> routers;
  std::vector<RouterOutput> outputs;
  std::vector<int> occupancy;
  std::vector<int> occ_scratch;

  CoordinateMap coords;
  LabelCache labels;
  std::optional<AddressMap> trees;
  std::uint64_t trees_epoch = ~0ULL;
  std::vector<NodeId> centers;

  std::optional<WirelessChannel> channel;
  std::vector<int> hub_of_router;   // -1 if not a hub
  std::vector<int> nearest_hub;     // per router
  std::vector<int> hub_pending;     // admitted, not yet on air
  std::map<PacketId, int> assembling;  // flits received at a source hub
  std::vector<WirelessEvent> wevents;

  std::vector<PacketRecord> packets;
  std::vector<PacketId> drops;
  Cycle now = 0;
  bool injecting_allowed = true;

  // stats
  std::uint64_t injected = 0, delivered = 0, dropped = 0;
  std::uint64_t injected_flits = 0, delivered_flits = 0, dropped_flits = 0;
  std::uint64_t measured_injected = 0, measured_injected_flits = 0;
  std::vector<double> latencies;
  std::uint64_t measured_delivered = 0, measured_delivered_flits = 0, measured_wireless = 0;
  std::vector<std::uint64_t> link_flits;
  std::uint64_t livelock = 0;
  bool deadlock = false;
  bool conservation_ok = true;
  int max_transmitters = 0;
  Cycle idle_cycles = 0;
  bool moved = false;

  explicit Impl(const SimConfig& cfg) : config(cfg), topo(build_topology(cfg)), view(topo) {
    validate(config, topo);
    config.traffic.seed = config.seed;
    vc_count = effective_vc_count(config);
    config.fabric.vc_count = vc_count;
    conc = topo.concentration();
    terminals = topo.node_count() * conc;

    const int n = topo.node_count();
    dist.resize(static_cast<std::size_t>(n) * n);
    for (NodeId u = 0; u < n; ++u) {
      auto d = bfs_distances(topo, u);
      for (NodeId v = 0; v < n; ++v) {
        if (d[v] < 0) throw Error(ErrorCode::kConfigError, "topology is disconnected");
        dist[static_cast<std::size_t>(u) * n + v] = d[v];
        diameter = std::max(diameter, d[v]);
      }
    }

    hub_of_router.assign(n, -1);
    if (config.wireless.enabled) {
      const auto& hubs = config.wireless.hubs;
      channel.emplace(static_cast<int>(hubs.size()), config.wireless.w_cycles);
      hub_pending.assign(hubs.size(), 0);
      for (std::size_t h = 0; h < hubs.size(); ++h) hub_of_router[hubs[h]] = static_cast<int>(h);
      nearest_hub.assign(n, 0);
      for (NodeId r = 0; r < n; ++r) {
        for (std::size_t h = 1; h < hubs.size(); ++h)
          if (d(r, hubs[h]) < d(r, hubs[nearest_hub[r]])) nearest_hub[r] = static_cast<int>(h);
      }
    }

    for (NodeId r = 0; r < n; ++r) {
      std::vector<NodeId> nbrs;
      for (int p = 0; p < topo.degree(r); ++p) nbrs.push_back(topo.neighbor(r, p));
      const int locals = conc + (hub_of_router[r] >= 0 ? 1 : 0);
      routers.emplace_back(r, std::move(nbrs), locals, config.fabric);
    }
    outputs.resize(n);
    occupancy.assign(n, 0);
    link_flits.assign(topo.link_count(), 0);

    if (config.algorithm == Algorithm::kGreedy || config.algorithm == Algorithm::kGreedyFallback) {
      auto anchors = config.anchors.empty() ? default_anchors(topo, std::min(config.anchor_count, n)) : config.anchors;
      coords = assign_virtual_coordinates(topo, anchors);
    }
    if (config.algorithm == Algorithm::kHierarchical)
      centers = config.centers.empty() ? default_anchors(topo, std::min(2, n)) : config.centers;

    change_points = fault_change_points(config.faults);
  }

  int d(NodeId a, NodeId b) const { return dist[static_cast<std::size_t>(a) * topo.node_count() + b]; }
  bool measuring(Cycle c) const { return c >= config.warmup && c < config.warmup + config.measure; }
  int local_port(int terminal) const { return terminal % conc; }
  int reinjection_port() const { return conc; }

  // ---- faults -------------------------------------------------------------

  void apply_faults() {
    while (next_change < change_points.size() && change_points[next_change] <= now) ++next_change;
    FaultSet f = faults_at(config.faults, topo, now);
    view = TopologyView(topo, f.nodes, f.links);
    ++epoch;
    labels.clear();

    std::set<PacketId> victims;
    for (NodeId r = 0; r < topo.node_count(); ++r) {
      if (!view.node_alive(r)) routers[r].for_each_flit([&](const Flit& fl) { victims.insert(fl.packet); });
      for (int p = 0; p < topo.degree(r); ++p) {
        if (view.link_alive(topo.out_link(r, p))) continue;
        for (int v = 0; v < vc_count; ++v)
          if (auto owner = routers[r].output_owner(p, v)) victims.insert(*owner);
      }
    }
    for (NodeId r = 0; r < topo.node_count(); ++r) {
      routers[r].for_each_routed([&](PacketId id, int port) {
        if (!view.link_alive(topo.out_link(r, port))) victims.insert(id);
      });
    }
    if (channel) {
      for (int h = 0; h < channel->hub_count(); ++h) {
        const bool hub_down = !view.node_alive(config.wireless.hubs[h]);
        for (PacketId p : channel->queue(h))
          if (hub_down || !view.node_alive(config.wireless.hubs[packets[p].dst_hub])) victims.insert(p);
      }
      if (auto a = channel->in_transmission()) {
        const PacketRecord& p = packets[*a];
        if (!view.node_alive(config.wireless.hubs[p.src_hub]) || !view.node_alive(config.wireless.hubs[p.dst_hub]))
          victims.insert(*a);
      }
      for (auto& [p, count] : assembling)
        if (!view.node_alive(packets[p].leg_target)) victims.insert(p);
    }
    drops.insert(drops.end(), victims.begin(), victims.end());
    purge();
  }

  // ---- drops --------------------------------------------------------------

  void drop_now(PacketId id) {
    PacketRecord& p = packets[id];
    if (p.dropped || p.delivered >= 0) return;
    p.dropped = true;
    ++dropped;
    dropped_flits += static_cast<std::uint64_t>(p.length - p.flits_delivered);
    // Admitted to a hub but not yet on air: release the admission slot.
    if (p.leg == PacketRecord::Leg::kToHub && p.src_hub >= 0) --hub_pending[p.src_hub];
    p.route.clear();
    p.route.shrink_to_fit();
  }

  void purge() {
    if (drops.empty()) return;
    std::sort(drops.begin(), drops.end());
    drops.erase(std::unique(drops.begin(), drops.end()), drops.end());
    auto is_dropped = [&](PacketId id) { return std::binary_search(drops.begin(), drops.end(), id); };
    std::vector<std::pair<int, int>> freed;
    for (NodeId r = 0; r < topo.node_count(); ++r) {
      freed.clear();
      routers[r].purge(is_dropped, freed);
      for (auto [in_port, vc] : freed) {
        LinkId back = topo.reverse(topo.out_link(r, in_port));
        routers[topo.link(back).src].return_credit(topo.link(back).port, vc);
      }
    }
    if (channel) {
      channel->purge(is_dropped);
      for (PacketId id : drops) assembling.erase(id);
    }
    for (PacketId id : drops) drop_now(id);
    drops.clear();
  }

  // ---- routing ------------------------------------------------------------

  bool plan_route(PacketRecord& p, NodeId from) {
    p.follows_route = false;
    p.fallback = false;
    p.route_pos = 0;
    p.route.clear();
    const NodeId target = p.leg_target;
    if (from == target) return true;
    if (!view.node_alive(target)) return false;
    switch (config.algorithm) {
      case Algorithm::kXy: {
        Route r = route_xy(topo, from, target);
        return is_valid_route(view, r);
      }
      case Algorithm::kNeighborhood: {
        auto lab = labels.get(epoch, from, view);
        if ((*lab)[target] < 0) return false;
        p.route = first_neighborhood_route(view, *lab, target);
        p.follows_route = true;
        return true;
      }
      case Algorithm::kHierarchical: {
        if (trees_epoch != epoch) {
          trees = build_address_trees(view, centers);
          trees_epoch = epoch;
        }
        try {
          p.route = hierarchical_route(*trees, from, target);
        } catch (const Error&) {
          return false;
        }
        p.follows_route = true;
        return true;
      }
      default:
        return true;
    }
  }

  RouteChoice follow_route(PacketRecord& p, NodeId r) {
    if (p.route_pos + 1 >= p.route.size() || p.route[p.route_pos] != r) return RouteChoice::drop();
    LinkId l = *topo.find_link(r, p.route[p.route_pos + 1]);
    if (!view.link_alive(l)) return RouteChoice::drop();
    return RouteChoice::forward(topo.link(l).port);
  }

  RouteChoice route(NodeId r, const Flit& head, int in_port) {
    PacketRecord& p = packets[head.packet];
    const NodeId target = head.dst;
    if (r == target) return RouteChoice::eject();
    if (!view.node_alive(target)) return RouteChoice::drop();
    if (p.follows_route) return follow_route(p, r);
    switch (config.algorithm) {
      case Algorithm::kXy: {
        int port = xy_port(topo, r, target);
        LinkId l = topo.out_link(r, port);
        if (!view.link_alive(l)) return RouteChoice::drop();
        std::uint32_t mask = ~0U;
        if (topo.kind() == TopologyKind::kTorus && vc_count >= 2) {
          std::optional<Channel> in;
          if (in_port < topo.degree(r)) in = Channel{topo.reverse(topo.out_link(r, in_port)), head.vc};
          mask = 1U << dateline_vc(topo, in ? &*in : nullptr, l);
        }
        return RouteChoice::forward(port, mask);
      }
      case Algorithm::kDyxy: {
        occ_scratch.assign(topo.degree(r), 0);
        for (int q = 0; q < topo.degree(r); ++q) occ_scratch[q] = occupancy[topo.neighbor(r, q)];
        RoutingDecision dcs = next_hop_dyxy(view, r, target, occ_scratch);
        if (dcs.kind != RoutingDecision::Kind::kForward) return RouteChoice::drop();
        return RouteChoice::forward(dcs.port,
                                    double_y_vc_mask(topo, vc_count, r, target, topo.out_link(r, dcs.port)));
      }
      case Algorithm::kGreedy:
      case Algorithm::kGreedyFallback: {
        RoutingDecision dcs = next_hop_greedy(coords, config.metric, view, r, target);
        if (dcs.kind == RoutingDecision::Kind::kForward) return RouteChoice::forward(dcs.port);
        if (config.algorithm == Algorithm::kGreedy) return RouteChoice::drop();
        auto lab = labels.get(epoch, r, view);
        if ((*lab)[target] < 0) return RouteChoice::drop();
        p.route = first_neighborhood_route(view, *lab, target);
        p.route_pos = 0;
        p.follows_route = true;
        p.fallback = true;
        return follow_route(p, r);
      }
      default:
        return RouteChoice::drop();
    }
  }

  // ---- packet lifecycle ---------------------------------------------------

  PacketId create_packet(int src_t, int dst_t) {
    const PacketId id = static_cast<PacketId>(packets.size());
    PacketRecord& p = packets.emplace_back();
    p.src_terminal = src_t;
    p.dst_terminal = dst_t;
    p.src = src_t / conc;
    p.dst = dst_t / conc;
    p.length = config.traffic.packet_length;
    p.injected = now;
    p.measured = measuring(now);
    p.leg_target = p.dst;
    ++injected;
    injected_flits += static_cast<std::uint64_t>(p.length);
    if (p.measured) {
      ++measured_injected;
      measured_injected_flits += static_cast<std::uint64_t>(p.length);
    }
    if (!view.node_alive(p.src) || !view.node_alive(p.dst)) {
      drop_now(id);
      return id;
    }
    if (channel && p.src != p.dst) {
      const int hs = nearest_hub[p.src];
      const int hd = nearest_hub[p.dst];
      const NodeId hub_s = config.wireless.hubs[hs];
      const NodeId hub_d = config.wireless.hubs[hd];
      const int wired = d(p.src, p.dst);
      if (hs != hd && view.node_alive(hub_s) && view.node_alive(hub_d) && d(p.src, hub_s) + 1 + d(hub_d, p.dst) < wired &&
          wireless_admission(wired, config.wireless.threshold, hub_pending[hs], config.wireless.queue_cap)) {
        p.wireless = true;
        p.leg = PacketRecord::Leg::kToHub;
        p.src_hub = hs;
        p.dst_hub = hd;
        p.leg_target = hub_s;
        ++hub_pending[hs];
      }
    }
    if (!plan_route(p, p.src)) {
      drop_now(id);
      return id;
    }
    for (const Flit& f : make_packet_flits(id, p.leg_target, p.length, now))
      routers[p.src].inject(local_port(src_t), f);
    return id;
  }

  void deliver_flits(PacketId id, int count, Cycle at) {
    PacketRecord& p = packets[id];
    p.flits_delivered += count;
    delivered_flits += static_cast<std::uint64_t>(count);
    if (p.flits_delivered < p.length) return;
    p.delivered = at;
    ++delivered;
    p.route.clear();
    p.route.shrink_to_fit();
    if (p.measured) {
      latencies.push_back(static_cast<double>(at - p.injected));
      ++measured_delivered;
      measured_delivered_flits += static_cast<std::uint64_t>(p.length);
      if (p.wireless) ++measured_wireless;
    }
  }

  // A flit reached the router where its current leg ends.
  void arrive_at_target(const Flit& f, Cycle at) {
    PacketRecord& p = packets[f.packet];
    if (p.dropped) return;
    if (p.leg == PacketRecord::Leg::kToHub) {
      int& got = assembling[f.packet];
      ++got;
      if (f.is_tail()) {
        assembling.erase(f.packet);
        channel->enqueue(p.src_hub, f.packet);
      }
      return;
    }
    deliver_flits(f.packet, 1, at);
  }

  void on_air_complete(PacketId id, Cycle at) {
    PacketRecord& p = packets[id];
    p.hops += 1;
    const NodeId hub = config.wireless.hubs[p.dst_hub];
    if (hub == p.dst) {
      p.leg = PacketRecord::Leg::kFromHub;
      deliver_flits(id, p.length, at);
      return;
    }
    p.leg = PacketRecord::Leg::kFromHub;
    p.leg_target = p.dst;
    if (!view.node_alive(p.dst) || !plan_route(p, hub)) {
      drop_now(id);
      return;
    }
    for (const Flit& f : make_packet_flits(id, p.leg_target, p.length, at)) routers[hub].inject(reinjection_port(), f);
  }

  // ---- cycle --------------------------------------------------------------

  void wireless_cycle() {
    if (!channel) return;
    wevents.clear();
    int tx = channel->step(wevents);
    max_transmitters = std::max(max_transmitters, tx);
    if (tx > 0) moved = true;
    for (const WirelessEvent& e : wevents) {
      if (e.kind == WirelessEvent::Kind::kStart) {
        --hub_pending[e.hub];
        packets[e.packet].leg = PacketRecord::Leg::kOverAir;
      } else if (e.kind == WirelessEvent::Kind::kComplete) {
        on_air_complete(e.packet, now + 1);
      }
    }
  }

  void inject_traffic() {
    if (config.traffic.injection_rate <= 0.0) return;
    TrafficContext ctx;
    ctx.terminals = terminals;
    if (topo.is_grid()) {
      ctx.grid_width = topo.params().width;
      ctx.grid_height = topo.params().height;
    }
    ctx.alive = [&](int t) { return view.node_alive(t / conc); };
    for (int t = 0; t < terminals; ++t) {
      if (config.max_packets > 0 && injected >= config.max_packets) return;
      if (!view.node_alive(t / conc)) continue;
      if (auto pkt = inject(config.traffic, ctx, t, now)) create_packet(pkt->src, pkt->dst);
    }
  }

  void step(bool with_traffic) {
    if (next_change < change_points.size() && change_points[next_change] <= now) apply_faults();
    wireless_cycle();
    if (with_traffic) inject_traffic();

    for (NodeId r = 0; r < topo.node_count(); ++r) occupancy[r] = routers[r].occupancy();

    // Phase A: every router reads only its own state and the occupancy snapshot.
    for (NodeId r = 0; r < topo.node_count(); ++r) {
      outputs[r].clear();
      if (!view.node_alive(r)) continue;
      routers[r].cycle(now, [&, r](const Flit& head, int in_port, int) { return route(r, head, in_port); },
                       outputs[r]);
    }

    // Phase B: commit link traversals and credits; they become visible at now+1.
    const int diam_bound = 4 * std::max(diameter, 1);
    for (NodeId r = 0; r < topo.node_count(); ++r) {
      RouterOutput& out = outputs[r];
      for (const Flit& f : out.ejected) {
        moved = true;
        arrive_at_target(f, now);
      }
      for (auto [port, flit] : out.sent) {
        moved = true;
        const LinkId l = topo.out_link(r, port);
        const NodeId next = topo.link(l).dst;
        if (measuring(now)) ++link_flits[l];
        PacketRecord& p = packets[flit.packet];
        if (flit.is_head()) {
          ++p.hops;
          if (p.follows_route) ++p.route_pos;
          if (p.hops > diam_bound) {
            ++livelock;
            if (config.test_mode)
              throw Error(ErrorCode::kLivelockDetected, "packet " + std::to_string(flit.packet) + " exceeded " +
                                                            std::to_string(diam_bound) + " hops");
            drops.push_back(flit.packet);
          }
        }
        flit.arrival = now + 1;
        if (next == flit.dst) {
          arrive_at_target(flit, now + 1);
        } else {
          routers[next].receive(topo.link(topo.reverse(l)).port, flit);
        }
      }
      for (auto [in_port, vc] : out.credits) {
        LinkId back = topo.reverse(topo.out_link(r, in_port));
        routers[topo.link(back).src].return_credit(topo.link(back).port, vc);
      }
      drops.insert(drops.end(), out.drops.begin(), out.drops.end());
    }
    purge();

    if (config.debug_checks && !conservation_holds()) {
      conservation_ok = false;
      if (config.test_mode) throw Error(ErrorCode::kProtocolViolation, "flit conservation broken at cycle " + std::to_string(now));
    }

    const bool busy = injected != delivered + dropped;
    if (busy && !moved) {
      ++idle_cycles;
      if (idle_cycles >= 10 * std::max(diameter, 1)) {
        deadlock = true;
        if (config.test_mode)
          throw Error(ErrorCode::kDeadlockDetected, "no flit moved for " + std::to_string(idle_cycles) + " cycles");
      }
    } else {
      idle_cycles = 0;
    }
    moved = false;
    ++now;
  }

  FlitCounts counts() const {
    FlitCounts c;
    c.injected = injected_flits;
    c.delivered = delivered_flits;
    c.dropped = dropped_flits;
    for (const Router& r : routers) c.in_flight += r.flit_count();
    for (const auto& [id, got] : assembling) c.in_flight += static_cast<std::uint64_t>(got);
    if (channel) {
      for (int h = 0; h < channel->hub_count(); ++h)
        for (PacketId id : channel->queue(h)) c.in_flight += static_cast<std::uint64_t>(packets[id].length);
      if (auto a = channel->in_transmission()) c.in_flight += static_cast<std::uint64_t>(packets[*a].length);
    }
    return c;
  }

  bool conservation_holds() const {
    FlitCounts c = counts();
    return c.injected == c.delivered + c.dropped + c.in_flight;
  }

  MetricsReport report() const {
    MetricsReport m;
    m.injected = injected;
    m.delivered = delivered;
    m.dropped = dropped;
    m.residual = injected - delivered - dropped;
    m.measured_injected = measured_injected;
    m.measured_delivered = measured_delivered;
    if (!latencies.empty()) {
      std::vector<double> sorted = latencies;
      std::sort(sorted.begin(), sorted.end());
      double sum = 0.0;
      for (double l : sorted) sum += l;
      m.avg_latency = sum / static_cast<double>(sorted.size());
      const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(sorted.size())));
      m.p99_latency = sorted[std::max<std::size_t>(rank, 1) - 1];
    }
    const double denom = static_cast<double>(terminals) * static_cast<double>(config.measure);
    m.throughput = static_cast<double>(measured_delivered_flits) / denom;
    m.offered = static_cast<double>(measured_injected_flits) / denom;
    m.link_utilization.resize(link_flits.size());
    double total = 0.0;
    for (std::size_t l = 0; l < link_flits.size(); ++l) {
      m.link_utilization[l] = static_cast<double>(link_flits[l]) / static_cast<double>(config.measure);
      total += m.link_utilization[l];
    }
    m.utilization = link_flits.empty() ? 0.0 : total / static_cast<double>(link_flits.size());
    m.wireless_share = measured_delivered ? static_cast<double>(measured_wireless) / static_cast<double>(measured_delivered) : 0.0;
    m.livelock = livelock;
    m.deadlock = deadlock;
    m.conservation_ok = conservation_ok && conservation_holds();
    m.max_transmitters = max_transmitters;
    m.cycles = now;
    return m;
  }
};

Simulation::Simulation(const SimConfig& config) : impl_(std::make_unique<Impl>(config)) {}
Simulation::~Simulation() = default;

MetricsReport Simulation::run() {
  const auto start = std::chrono::steady_clock::now();
  Impl& s = *impl_;
  const Cycle active = s.config.warmup + s.config.measure;
  while (s.now < active && !s.deadlock) s.step(true);
  const Cycle drain_end = s.now + s.config.drain;
  while (s.now < drain_end && !s.deadlock && !quiescent()) s.step(false);
  MetricsReport m = s.report();
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return m;
}

PacketId Simulation::inject_packet(int src_terminal, int dst_terminal) {
  if (src_terminal < 0 || dst_terminal < 0 || src_terminal >= impl_->terminals || dst_terminal >= impl_->terminals)
    throw Error(ErrorCode::kInvalidParams, "terminal out of range");
  return impl_->create_packet(src_terminal, dst_terminal);
}

void Simulation::step(bool with_traffic) { impl_->step(with_traffic); }
Cycle Simulation::now() const { return impl_->now; }
bool Simulation::quiescent() const { return impl_->injected == impl_->delivered + impl_->dropped; }
const PacketRecord& Simulation::packet(PacketId id) const { return impl_->packets.at(id); }
std::size_t Simulation::packet_count() const { return impl_->packets.size(); }
const Topology& Simulation::topology() const { return impl_->topo; }
const FabricParams& Simulation::fabric() const { return impl_->config.fabric; }
int Simulation::diameter() const { return impl_->diameter; }
FlitCounts Simulation::flit_counts() const { return impl_->counts(); }
int Simulation::max_transmitters() const { return impl_->max_transmitters; }
MetricsReport Simulation::report() const { return impl_->report(); }

MetricsReport run(const SimConfig& config) {
  Simulation sim(config);
  return sim.run();
}

namespace {

double latency_at(SimConfig config, double rate, bool& over_capacity) {
  config.traffic.injection_rate = rate;
  MetricsReport m = run(config);
  over_capacity = m.deadlock || m.measured_delivered < m.measured_injected;
  return m.avg_latency;
}

}  // namespace

SaturationResult measure_saturation(const SimConfig& config, const std::vector<double>& rate_grid) {
  if (rate_grid.empty()) throw Error(ErrorCode::kInvalidParams, "empty rate grid");
  std::vector<double> grid = rate_grid;
  std::sort(grid.begin(), grid.end());
  SaturationResult res;
  std::size_t next = 0;
  bool first_over = false;
  if (grid.front() <= 0.01) {
    res.rates.push_back(grid.front());
    res.latencies.push_back(latency_at(config, grid.front(), first_over));
    next = 1;
  }
  if (next == 1 && !first_over) {
    res.zero_load_latency = res.latencies.front();
  } else {
    bool o = false;
    res.zero_load_latency = latency_at(config, 0.01, o);
  }
  res.rate = grid.back();
  if (next == 1 && (first_over || res.latencies.front() > kSaturationMultiplier * res.zero_load_latency)) {
    res.rate = grid.front();
    res.saturated = true;
    return res;
  }
  // Points past the first crossing are not simulated.
  for (; next < grid.size(); ++next) {
    bool o = false;
    res.rates.push_back(grid[next]);
    res.latencies.push_back(latency_at(config, grid[next], o));
    if (o || res.latencies.back() > kSaturationMultiplier * res.zero_load_latency) {
      res.rate = grid[next];
      res.saturated = true;
      break;
    }
  }
  return res;
}

}  // namespace noc
