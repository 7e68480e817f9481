// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "nocsim/fabric.hpp"

#include <algorithm>

#include "nocsim/error.hpp"

namespace noc {

std::string to_string(Switching s) {
  switch (s) {
    case Switching::kStoreAndForward: return "saf";
    case Switching::kVirtualCutThrough: return "vct";
    case Switching::kWormhole: return "wormhole";
  }
  return "wormhole";
}

std::optional<Switching> parse_switching(const std::string& name) {
  for (auto s : {Switching::kStoreAndForward, Switching::kVirtualCutThrough, Switching::kWormhole})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

std::vector<Flit> make_packet_flits(PacketId packet, NodeId dst, int length, Cycle arrival) {
  std::vector<Flit> flits;
  flits.reserve(length);
  for (int i = 0; i < length; ++i) {
    FlitKind kind = FlitKind::kBody;
    if (length == 1) {
      kind = FlitKind::kHeadTail;
    } else if (i == 0) {
      kind = FlitKind::kHead;
    } else if (i == length - 1) {
      kind = FlitKind::kTail;
    }
    flits.push_back(Flit{packet, kind, dst, length, arrival, 0});
  }
  return flits;
}

Acceptance flow_control_accept(Switching policy, const BufferState& state, const Flit& flit, int packet_length) {
  if (!flit.is_head()) {
    if (!state.bound)
      throw Error(ErrorCode::kProtocolViolation, "flit of packet " + std::to_string(flit.packet) + " on an unbound VC");
    return *state.bound == flit.packet && state.free_slots >= 1 ? Acceptance::kAccept : Acceptance::kStall;
  }
  if (state.bound) return Acceptance::kStall;
  const int need = policy == Switching::kWormhole ? 1 : packet_length;
  return state.free_slots >= need ? Acceptance::kAccept : Acceptance::kStall;
}

// ---------------------------------------------------------------------------
// Router
// ---------------------------------------------------------------------------

namespace {
constexpr int kNotEligible = -1;
constexpr int kNoDownstreamVc = -2;
}  // namespace

Router::Router(NodeId id, std::vector<NodeId> out_neighbors, int local_ports, const FabricParams& params)
    : id_(id), neighbors_(std::move(out_neighbors)), params_(params) {
  const int net = network_ports();
  inputs_.assign(net, std::vector<InputVc>(params_.vc_count));
  local_.resize(local_ports);
  credits_.assign(net, std::vector<int>(params_.vc_count, params_.buffer_depth));
  owners_.assign(net, std::vector<std::optional<PacketId>>(params_.vc_count));
  input_rr_.assign(net + local_ports, 0);
  output_rr_.assign(net, 0);
  requests_.resize(net);
}

void Router::receive(int in_port, const Flit& flit) {
  auto& buf = inputs_[in_port][flit.vc].buffer;
  if (static_cast<int>(buf.size()) >= params_.buffer_depth)
    throw Error(ErrorCode::kProtocolViolation, "buffer overflow at router " + std::to_string(id_));
  buf.push_back(flit);
  ++occupancy_;
}

void Router::inject(int local_port, const Flit& flit) { local_[local_port].buffer.push_back(flit); }

std::optional<PacketId> Router::output_owner(int out_port, int vc) const { return owners_[out_port][vc]; }

void Router::reset(InputVc& ivc) {
  ivc.routed = false;
  ivc.drop_requested = false;
  ivc.route = RouteChoice{};
  ivc.out_vc = -1;
  ivc.sink = false;
}

int Router::eligibility(Cycle now, int unit, int vc, const RouteFunction& route, RouterOutput& out) {
  InputVc& ivc = unit_vc(unit, vc);
  if (ivc.buffer.empty()) return kNotEligible;
  const Flit& f = ivc.buffer.front();
  if (f.arrival + params_.pipeline > now) return kNotEligible;
  if (!ivc.routed) {
    if (!f.is_head())
      throw Error(ErrorCode::kProtocolViolation, "non-head flit at the front of an idle VC at router " + std::to_string(id_));
    if (ivc.drop_requested) return kNotEligible;
    RouteChoice choice = route(f, unit, vc);
    if (choice.kind == RouteChoice::Kind::kDrop) {
      ivc.drop_requested = true;
      out.drops.push_back(f.packet);
      return kNotEligible;
    }
    ivc.routed = true;
    ivc.packet = f.packet;
    ivc.route = choice;
    ivc.sink = choice.kind == RouteChoice::Kind::kForward && neighbors_[choice.port] == f.dst;
  }
  if (ivc.route.kind == RouteChoice::Kind::kEject) return kNoDownstreamVc;

  if (f.is_head() && params_.switching == Switching::kStoreAndForward) {
    // Forward only once the whole packet is here and through the pipeline.
    bool complete = false;
    for (std::size_t i = 0; i < ivc.buffer.size() && i < static_cast<std::size_t>(f.length); ++i) {
      const Flit& g = ivc.buffer[i];
      if (g.packet != f.packet) break;
      if (g.is_tail()) {
        complete = g.arrival + params_.pipeline <= now;
        break;
      }
    }
    if (!complete) return kNotEligible;
  }
  if (ivc.sink) return kNoDownstreamVc;

  const int port = ivc.route.port;
  if (f.is_head()) {
    for (int v = 0; v < params_.vc_count; ++v) {
      if (((ivc.route.vc_mask >> v) & 1U) == 0) continue;
      if (flow_control_accept(params_.switching, {credits_[port][v], owners_[port][v]}, f, f.length) ==
          Acceptance::kAccept)
        return v;
    }
    return kNotEligible;
  }
  const int v = ivc.out_vc;
  return flow_control_accept(params_.switching, {credits_[port][v], owners_[port][v]}, f, f.length) ==
                 Acceptance::kAccept
             ? v
             : kNotEligible;
}

void Router::cycle(Cycle now, const RouteFunction& route, RouterOutput& out) {
  const int net = network_ports();
  const int units = net + local_ports();
  for (auto& r : requests_) r.clear();

  for (int unit = 0; unit < units; ++unit) {
    const int nvc = unit_vc_count(unit);
    for (int k = 0; k < nvc; ++k) {
      const int vc = (input_rr_[unit] + k) % nvc;
      const int out_vc = eligibility(now, unit, vc, route, out);
      if (out_vc == kNotEligible) continue;
      InputVc& ivc = unit_vc(unit, vc);
      if (ivc.route.kind == RouteChoice::Kind::kEject) {
        Flit f = ivc.buffer.front();
        ivc.buffer.pop_front();
        if (unit < net) {
          --occupancy_;
          out.credits.emplace_back(unit, vc);
        }
        if (f.is_tail()) reset(ivc);
        out.ejected.push_back(f);
        input_rr_[unit] = (vc + 1) % nvc;
      } else {
        requests_[ivc.route.port].push_back(Request{unit, vc, out_vc});
      }
      break;
    }
  }

  for (int port = 0; port < net; ++port) {
    const auto& reqs = requests_[port];
    if (reqs.empty()) continue;
    const Request* win = nullptr;
    int best_rank = units;
    for (const Request& r : reqs) {
      int rank = ((r.unit - output_rr_[port]) % units + units) % units;
      if (rank < best_rank) {
        best_rank = rank;
        win = &r;
      }
    }
    InputVc& ivc = unit_vc(win->unit, win->vc);
    Flit f = ivc.buffer.front();
    ivc.buffer.pop_front();
    if (win->unit < net) {
      --occupancy_;
      out.credits.emplace_back(win->unit, win->vc);
    }
    if (ivc.sink) {
      f.vc = 0;
    } else {
      f.vc = win->out_vc;
      --credits_[port][win->out_vc];
      if (f.is_head()) {
        owners_[port][win->out_vc] = f.packet;
        ivc.out_vc = win->out_vc;
      }
      if (f.is_tail()) owners_[port][win->out_vc].reset();
    }
    if (f.is_tail()) reset(ivc);
    out.sent.emplace_back(port, f);
    input_rr_[win->unit] = (win->vc + 1) % unit_vc_count(win->unit);
    output_rr_[port] = (win->unit + 1) % units;
  }
}

std::size_t Router::flit_count() const {
  std::size_t n = 0;
  for_each_flit([&](const Flit&) { ++n; });
  return n;
}

void Router::for_each_flit(const std::function<void(const Flit&)>& fn) const {
  for (const auto& port : inputs_)
    for (const auto& ivc : port)
      for (const Flit& f : ivc.buffer) fn(f);
  for (const auto& ivc : local_)
    for (const Flit& f : ivc.buffer) fn(f);
}

void Router::for_each_routed(const std::function<void(PacketId, int)>& fn) const {
  auto visit = [&](const InputVc& ivc) {
    if (ivc.routed && ivc.route.kind == RouteChoice::Kind::kForward) fn(ivc.packet, ivc.route.port);
  };
  for (const auto& port : inputs_)
    for (const auto& ivc : port) visit(ivc);
  for (const auto& ivc : local_) visit(ivc);
}

void Router::purge(const std::function<bool(PacketId)>& dropped, std::vector<std::pair<int, int>>& freed) {
  auto purge_vc = [&](InputVc& ivc) {
    const bool front_dropped = ivc.routed ? dropped(ivc.packet)
                                          : !ivc.buffer.empty() && dropped(ivc.buffer.front().packet);
    const std::size_t before = ivc.buffer.size();
    ivc.buffer.erase(std::remove_if(ivc.buffer.begin(), ivc.buffer.end(), [&](const Flit& f) { return dropped(f.packet); }),
                     ivc.buffer.end());
    if (front_dropped) reset(ivc);
    return before - ivc.buffer.size();
  };
  for (int p = 0; p < network_ports(); ++p) {
    for (int v = 0; v < params_.vc_count; ++v) {
      std::size_t removed = purge_vc(inputs_[p][v]);
      occupancy_ -= static_cast<int>(removed);
      for (std::size_t i = 0; i < removed; ++i) freed.emplace_back(p, v);
      if (owners_[p][v] && dropped(*owners_[p][v])) owners_[p][v].reset();
    }
  }
  for (auto& ivc : local_) purge_vc(ivc);
}

// ---------------------------------------------------------------------------
// Wireless
// ---------------------------------------------------------------------------

bool wireless_admission(int wired_distance, int distance_threshold, int hub_queue_len, int queue_cap) {
  return wired_distance >= distance_threshold && hub_queue_len < queue_cap;
}

WirelessChannel::WirelessChannel(int hub_count, int w_cycles) : w_cycles_(w_cycles), queues_(hub_count) {
  if (hub_count < 1) throw Error(ErrorCode::kInvalidParams, "wireless channel needs at least one hub");
  if (w_cycles < 1) throw Error(ErrorCode::kInvalidParams, "wireless transmission must take at least one cycle");
}

int WirelessChannel::step(std::vector<WirelessEvent>& events) {
  if (!active_) {
    auto& q = queues_[holder_];
    if (q.empty()) {
      events.push_back({WirelessEvent::Kind::kTokenPass, holder_, 0});
      pass_token();
      return 0;
    }
    active_ = q.front();
    q.pop_front();
    remaining_ = w_cycles_;
    events.push_back({WirelessEvent::Kind::kStart, holder_, *active_});
  }
  if (--remaining_ == 0) {
    events.push_back({WirelessEvent::Kind::kComplete, holder_, *active_});
    active_.reset();
    pass_token();
  }
  return 1;
}

void WirelessChannel::purge(const std::function<bool(PacketId)>& dropped) {
  for (auto& q : queues_) q.erase(std::remove_if(q.begin(), q.end(), dropped), q.end());
  if (active_ && dropped(*active_)) {
    active_.reset();
    remaining_ = 0;
    pass_token();
  }
}

}  // namespace noc
