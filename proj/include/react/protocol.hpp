#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "react/forwarding.hpp"
#include "react/sliding_window.hpp"
#include "react/txn_key.hpp"

namespace react {

enum class Direction : std::uint8_t { request, response };

enum class MarkKind : std::uint8_t { none, forward, broadcast, forward_rule, broadcast_response };

// Inter-switch mark carried on duplicated packets. origin is the switch
// that emitted the copy and is meaningful for every kind except none.
struct Mark {
  MarkKind kind = MarkKind::none;
  SwitchId origin = 0;

  friend bool operator==(const Mark&, const Mark&) = default;
};

std::string to_string(const Mark& mark);

struct Packet {
  Direction dir = Direction::request;
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint16_t txn_id = 0;
  Mark mark;
  bool attack = false;

  TxnKey key() const {
    return dir == Direction::request ? TxnKey{txn_id, src} : TxnKey{txn_id, dst};
  }
};

enum class Verdict : std::uint8_t { forward_to_destination, drop };

// A marked copy addressed to one specific switch. Broadcast fan-out is
// expanded into per-switch emissions; the emitting switch never appears.
struct Emission {
  Packet packet;
  SwitchId to = 0;

  friend bool operator==(const Emission&, const Emission&) = default;
};

struct SwitchAction {
  Verdict verdict = Verdict::drop;
  std::vector<Emission> emissions;
};

struct ProtocolCounters {
  std::uint64_t requests_seen = 0;
  std::uint64_t responses_seen = 0;
  std::uint64_t unmatched_responses = 0;
  std::uint64_t broadcasts_emitted = 0;         // request broadcasts (one per decision)
  std::uint64_t forward_copies_emitted = 0;     // rule-driven request duplicates
  std::uint64_t rule_install_copies_emitted = 0;
  std::uint64_t response_broadcasts_emitted = 0;
  std::uint64_t rules_installed = 0;            // table mutations
  std::uint64_t protocol_errors = 0;
};

struct SwitchModeConfig {
  // Retransmission check: when false the write window is skipped, valid
  // when the client timeout exceeds one rotation interval.
  bool include_write_window_on_retrans_check = true;
  bool ntp_mode = false;
  bool peacetime_mode = false;
  double unmatched_threshold = 0.1;
  unsigned prefix_len = 16;
  std::size_t ratio_window_size = 1000;
};

// One ReAct switch: sliding-window request filter, forwarding and
// forwarded-requests tables, counters, and the request/response handlers.
// Owned and mutated by a single executor; handlers are state transitions
// of (state, packet, now) returning the verdict and any marked copies.
class SwitchState {
 public:
  SwitchState(SwitchId id, std::vector<SwitchId> peers, SlidingWindowFilter filter,
              ForwardedRequestsTable forwarded, SwitchModeConfig mode,
              std::size_t forwarding_capacity = 1 << 20);

  SwitchAction handle_request(const Packet& pkt, double now);
  SwitchAction handle_response(const Packet& pkt, double now);

  // True when the request key looks like a retransmission under the
  // configured write-window policy.
  bool classify_retransmission(const TxnKey& key, double now) const;

  void rotate_filter(double now) { filter_.rotate(now); }
  std::size_t expire_forwarded_requests(double now) { return forwarded_.expire(now); }

  SwitchId id() const { return id_; }
  const std::vector<SwitchId>& peers() const { return peers_; }
  SlidingWindowFilter& filter() { return filter_; }
  const SlidingWindowFilter& filter() const { return filter_; }
  RequestForwardingTable& forwarding_table() { return forwarding_; }
  const RequestForwardingTable& forwarding_table() const { return forwarding_; }
  ForwardedRequestsTable& forwarded_requests() { return forwarded_; }
  const ForwardedRequestsTable& forwarded_requests() const { return forwarded_; }
  const ProtocolCounters& counters() const { return counters_; }
  const SwitchModeConfig& mode() const { return mode_; }
  bool has_symmetric_evidence(std::uint32_t addr) const {
    return evidence_.contains(mask_address(addr, mode_.prefix_len));
  }

 private:
  void emit_broadcast(const Packet& pkt, MarkKind kind, SwitchAction& action);
  void record_response_sample(bool unmatched);
  double unmatched_ratio() const;

  SwitchId id_;
  std::vector<SwitchId> peers_;
  SlidingWindowFilter filter_;
  RequestForwardingTable forwarding_;
  ForwardedRequestsTable forwarded_;
  SwitchModeConfig mode_;
  ProtocolCounters counters_;

  // Prefixes with locally matched responses; suppresses the immediate
  // broadcast for protocols whose retries use fresh transaction IDs.
  std::unordered_set<std::uint32_t> evidence_;

  // Ring of matched/unmatched outcomes over the most recent responses,
  // backing the peace-time unmatched-ratio gate.
  std::vector<std::uint8_t> ratio_ring_;
  std::size_t ratio_next_ = 0;
  std::size_t ratio_filled_ = 0;
  std::size_t ratio_unmatched_ = 0;
};

// Fixed tab-separated trace schema:
// time<TAB>switch<TAB>direction<TAB>src<TAB>dst<TAB>txn<TAB>mark<TAB>verdict<TAB>emissions
std::string format_trace_line(double now, SwitchId sw, const Packet& pkt,
                              const SwitchAction& action);

}  // namespace react
