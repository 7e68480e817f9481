// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nocsim/topology.hpp"

namespace noc {

using PacketId = std::uint32_t;
using Cycle = std::int64_t;

enum class Switching { kStoreAndForward, kVirtualCutThrough, kWormhole };

std::string to_string(Switching s);
std::optional<Switching> parse_switching(const std::string& name);

enum class FlitKind : std::uint8_t { kHead, kBody, kTail, kHeadTail };

struct Flit {
  PacketId packet = 0;
  FlitKind kind = FlitKind::kHeadTail;
  NodeId dst = 0;      // router where this leg of the packet leaves the fabric
  int length = 1;      // packet length in flits
  Cycle arrival = 0;   // cycle the flit entered its current buffer
  int vc = 0;

  bool is_head() const { return kind == FlitKind::kHead || kind == FlitKind::kHeadTail; }
  bool is_tail() const { return kind == FlitKind::kTail || kind == FlitKind::kHeadTail; }
};

// Head, bodies, tail (or one head_tail) for a packet of `length` flits.
std::vector<Flit> make_packet_flits(PacketId packet, NodeId dst, int length, Cycle arrival);

struct FabricParams {
  Switching switching = Switching::kWormhole;
  int buffer_depth = 4;
  int vc_count = 1;
  int pipeline = 1;
};

// Upstream view of a downstream input VC.
struct BufferState {
  int free_slots = 0;
  std::optional<PacketId> bound;
};

enum class Acceptance { kAccept, kStall };

// Throws ProtocolViolation for a non-head flit on an unbound VC.
Acceptance flow_control_accept(Switching policy, const BufferState& state, const Flit& flit, int packet_length);

struct RouteChoice {
  enum class Kind { kForward, kEject, kDrop };
  Kind kind = Kind::kDrop;
  int port = -1;
  std::uint32_t vc_mask = ~0U;

  static RouteChoice forward(int port, std::uint32_t vc_mask = ~0U) { return {Kind::kForward, port, vc_mask}; }
  static RouteChoice eject() { return {Kind::kEject, -1, 0}; }
  static RouteChoice drop() { return {Kind::kDrop, -1, 0}; }
};

// Called once per packet per router, when its head reaches the front of
// an input VC. in_port >= network port count denotes a local port.
using RouteFunction = std::function<RouteChoice(const Flit& head, int in_port, int in_vc)>;

struct RouterOutput {
  std::vector<std::pair<int, Flit>> sent;     // (output port, flit tagged with its downstream VC)
  std::vector<std::pair<int, int>> credits;   // (input port, vc) slots freed this cycle
  std::vector<Flit> ejected;
  std::vector<PacketId> drops;

  void clear() {
    sent.clear();
    credits.clear();
    ejected.clear();
    drops.clear();
  }
};

// Input-queued virtual-channel router with credit flow control. A flit is
// eligible P cycles after it entered its buffer; each input port and each
// output port moves at most one flit per cycle; output arbitration is
// round-robin over input ports. A downstream VC is held by one packet from
// head to tail. Flits whose next hop is their destination router are
// consumed there on arrival and need no downstream credit.
class Router {
 public:
  Router(NodeId id, std::vector<NodeId> out_neighbors, int local_ports, const FabricParams& params);

  NodeId id() const { return id_; }
  int network_ports() const { return static_cast<int>(neighbors_.size()); }
  int local_ports() const { return static_cast<int>(local_.size()); }

  void receive(int in_port, const Flit& flit);
  void inject(int local_port, const Flit& flit);
  void return_credit(int out_port, int vc) { ++credits_[out_port][vc]; }

  void cycle(Cycle now, const RouteFunction& route, RouterOutput& out);

  // Flits buffered in network input VCs (the DyXY congestion signal).
  int occupancy() const { return occupancy_; }
  int buffered(int in_port, int vc) const { return static_cast<int>(inputs_[in_port][vc].buffer.size()); }
  std::size_t local_backlog(int local_port) const { return local_[local_port].buffer.size(); }
  int credits(int out_port, int vc) const { return credits_[out_port][vc]; }
  std::optional<PacketId> output_owner(int out_port, int vc) const;
  std::size_t flit_count() const;
  const FabricParams& params() const { return params_; }

  // Removes every flit of packets matching `dropped`, releasing VC bindings.
  // Freed network-port slots are appended as (input port, vc) so the caller
  // can return the credits upstream.
  void purge(const std::function<bool(PacketId)>& dropped, std::vector<std::pair<int, int>>& freed);

  void for_each_flit(const std::function<void(const Flit&)>& fn) const;
  // Packets whose input VC is routed to a network output port, with that port.
  void for_each_routed(const std::function<void(PacketId, int)>& fn) const;

 private:
  struct InputVc {
    std::deque<Flit> buffer;
    bool routed = false;
    PacketId packet = 0;
    bool drop_requested = false;
    RouteChoice route;
    int out_vc = -1;
    bool sink = false;
  };
  struct Request {
    int unit = -1;  // input port (network) or network_ports + local index
    int vc = 0;
    int out_vc = -1;
  };

  InputVc& unit_vc(int unit, int vc) {
    return unit < network_ports() ? inputs_[unit][vc] : local_[unit - network_ports()];
  }
  int unit_vc_count(int unit) const { return unit < network_ports() ? params_.vc_count : 1; }
  // Returns the downstream VC to use (or -2 for eject / sink with no VC), -1 if not eligible.
  int eligibility(Cycle now, int unit, int vc, const RouteFunction& route, RouterOutput& out);
  void reset(InputVc& ivc);

  NodeId id_;
  std::vector<NodeId> neighbors_;
  FabricParams params_;
  std::vector<std::vector<InputVc>> inputs_;
  std::vector<InputVc> local_;
  std::vector<std::vector<int>> credits_;
  std::vector<std::vector<std::optional<PacketId>>> owners_;
  std::vector<int> input_rr_;
  std::vector<int> output_rr_;
  int occupancy_ = 0;
  std::vector<std::vector<Request>> requests_;  // scratch, per output port
};

// Wireless admission: long wired trips only, and only while the source
// hub's queue is under its cap.
bool wireless_admission(int wired_distance, int distance_threshold, int hub_queue_len, int queue_cap);

struct WirelessEvent {
  enum class Kind { kStart, kComplete, kTokenPass };
  Kind kind = Kind::kTokenPass;
  int hub = 0;          // transmitting hub, or the hub passing the token
  PacketId packet = 0;  // kStart / kComplete only
};

// Single shared channel arbitrated by a round-robin token. The holder with
// a queued packet occupies the channel for W cycles and then passes the
// token; an idle holder passes it after one cycle.
class WirelessChannel {
 public:
  WirelessChannel(int hub_count, int w_cycles);

  int hub_count() const { return static_cast<int>(queues_.size()); }
  int token_holder() const { return holder_; }
  bool busy() const { return active_.has_value(); }
  std::optional<PacketId> in_transmission() const { return active_; }
  std::size_t queue_length(int hub) const { return queues_[hub].size(); }
  const std::deque<PacketId>& queue(int hub) const { return queues_[hub]; }

  void enqueue(int hub, PacketId packet) { queues_[hub].push_back(packet); }
  // Advances one cycle; returns the number of hubs transmitting during it (0 or 1).
  int step(std::vector<WirelessEvent>& events);
  void purge(const std::function<bool(PacketId)>& dropped);

 private:
  void pass_token() { holder_ = (holder_ + 1) % hub_count(); }

  int w_cycles_;
  int holder_ = 0;
  int remaining_ = 0;
  std::optional<PacketId> active_;
  std::vector<std::deque<PacketId>> queues_;
};

}  // namespace noc
