#include "react/protocol.hpp"

#include <cstdio>

namespace react {

std::string to_string(const Mark& mark) {
  switch (mark.kind) {
    case MarkKind::none:
      return "none";
    case MarkKind::forward:
      return "forward:S" + std::to_string(mark.origin);
    case MarkKind::broadcast:
      return "broadcast:S" + std::to_string(mark.origin);
    case MarkKind::forward_rule:
      return "forward_rule:S" + std::to_string(mark.origin);
    case MarkKind::broadcast_response:
      return "broadcast_response:S" + std::to_string(mark.origin);
  }
  return "invalid";
}

SwitchState::SwitchState(SwitchId id, std::vector<SwitchId> peers, SlidingWindowFilter filter,
                         ForwardedRequestsTable forwarded, SwitchModeConfig mode,
                         std::size_t forwarding_capacity)
    : id_(id),
      peers_(std::move(peers)),
      filter_(std::move(filter)),
      forwarding_(forwarding_capacity),
      forwarded_(std::move(forwarded)),
      mode_(mode) {
  if (mode_.peacetime_mode) ratio_ring_.assign(mode_.ratio_window_size, 0);
}

bool SwitchState::classify_retransmission(const TxnKey& key, double now) const {
  return filter_.check(key, now, mode_.include_write_window_on_retrans_check);
}

void SwitchState::emit_broadcast(const Packet& pkt, MarkKind kind, SwitchAction& action) {
  for (SwitchId peer : peers_) {
    Packet copy = pkt;
    copy.mark = Mark{kind, id_};
    action.emissions.push_back({copy, peer});
  }
}

SwitchAction SwitchState::handle_request(const Packet& pkt, double now) {
  SwitchAction action;
  ++counters_.requests_seen;
  const TxnKey key = TxnKey{pkt.txn_id, pkt.src};

  switch (pkt.mark.kind) {
    case MarkKind::none: {
      const bool retransmission = classify_retransmission(key, now);
      filter_.insert(key, now);
      action.verdict = Verdict::forward_to_destination;
      if (!retransmission) {
        const auto targets = forwarding_.lookup(pkt.src);
        if (!targets.empty()) {
          for (SwitchId target : targets) {
            if (target == id_) continue;
            Packet copy = pkt;
            copy.mark = Mark{MarkKind::forward, id_};
            action.emissions.push_back({copy, target});
            ++counters_.forward_copies_emitted;
          }
        } else if (mode_.ntp_mode && !has_symmetric_evidence(pkt.src)) {
          // Retries carry fresh IDs here, so asymmetry discovery cannot
          // wait for a retransmission: broadcast the first request from an
          // unknown prefix right away.
          emit_broadcast(pkt, MarkKind::broadcast, action);
          ++counters_.broadcasts_emitted;
        }
      } else {
        // Re-insert so the entry is not evicted while the retry is in
        // flight, then ask every other switch whether it sees the
        // responses.
        emit_broadcast(pkt, MarkKind::broadcast, action);
        ++counters_.broadcasts_emitted;
      }
      break;
    }
    case MarkKind::forward:
      // Copy from an upstream switch: log it so the response can be
      // matched here, but never forward it toward the server.
      filter_.insert(key, now);
      action.verdict = Verdict::drop;
      break;
    case MarkKind::broadcast:
      filter_.insert(key, now);
      forwarded_.append(pkt.txn_id, pkt.mark.origin, now);
      action.verdict = Verdict::drop;
      break;
    default:
      ++counters_.protocol_errors;
      action.verdict = Verdict::drop;
      break;
  }
  return action;
}

void SwitchState::record_response_sample(bool unmatched) {
  if (ratio_ring_.empty()) return;
  if (ratio_filled_ == ratio_ring_.size()) {
    ratio_unmatched_ -= ratio_ring_[ratio_next_];
  } else {
    ++ratio_filled_;
  }
  ratio_ring_[ratio_next_] = unmatched ? 1 : 0;
  ratio_unmatched_ += ratio_ring_[ratio_next_];
  ratio_next_ = (ratio_next_ + 1) % ratio_ring_.size();
}

double SwitchState::unmatched_ratio() const {
  if (ratio_filled_ == 0) return 0.0;
  return static_cast<double>(ratio_unmatched_) / static_cast<double>(ratio_filled_);
}

SwitchAction SwitchState::handle_response(const Packet& pkt, double now) {
  SwitchAction action;
  const TxnKey key = TxnKey{pkt.txn_id, pkt.dst};

  switch (pkt.mark.kind) {
    case MarkKind::none: {
      ++counters_.responses_seen;
      const bool matched = filter_.check(key, now, /*include_write_window=*/true);
      if (mode_.peacetime_mode) record_response_sample(!matched);
      if (matched) {
        action.verdict = Verdict::forward_to_destination;
        if (mode_.ntp_mode) evidence_.insert(mask_address(pkt.dst, mode_.prefix_len));
      } else {
        ++counters_.unmatched_responses;
        if (mode_.peacetime_mode && unmatched_ratio() < mode_.unmatched_threshold) {
          action.verdict = Verdict::forward_to_destination;
          emit_broadcast(pkt, MarkKind::broadcast_response, action);
          ++counters_.response_broadcasts_emitted;
        } else {
          action.verdict = Verdict::drop;
        }
      }
      // Independently of the verdict: if this transaction was broadcast to
      // us, tell each origin switch where its responses arrive.
      for (SwitchId origin : forwarded_.lookup(pkt.txn_id, now)) {
        Packet copy = pkt;
        copy.mark = Mark{MarkKind::forward_rule, id_};
        action.emissions.push_back({copy, origin});
        ++counters_.rule_install_copies_emitted;
      }
      break;
    }
    case MarkKind::forward_rule:
      if (forwarding_.install(mask_address(pkt.dst, mode_.prefix_len), mode_.prefix_len,
                              pkt.mark.origin, now)) {
        ++counters_.rules_installed;
      }
      action.verdict = Verdict::drop;
      break;
    case MarkKind::broadcast_response:
      if (!mode_.peacetime_mode) {
        ++counters_.protocol_errors;
        action.verdict = Verdict::drop;
        break;
      }
      if (filter_.check(key, now, /*include_write_window=*/true)) {
        if (forwarding_.install(mask_address(pkt.dst, mode_.prefix_len), mode_.prefix_len,
                                pkt.mark.origin, now)) {
          ++counters_.rules_installed;
        }
      }
      action.verdict = Verdict::drop;
      break;
    default:
      ++counters_.protocol_errors;
      action.verdict = Verdict::drop;
      break;
  }
  return action;
}

std::string format_trace_line(double now, SwitchId sw, const Packet& pkt,
                              const SwitchAction& action) {
  char head[64];
  std::snprintf(head, sizeof(head), "%.6f\tS%u\t", now, sw);
  std::string line = head;
  line += pkt.dir == Direction::request ? "req" : "resp";
  line += '\t';
  line += format_ipv4(pkt.src);
  line += '\t';
  line += format_ipv4(pkt.dst);
  line += '\t';
  line += std::to_string(pkt.txn_id);
  line += '\t';
  line += to_string(pkt.mark);
  line += '\t';
  line += action.verdict == Verdict::forward_to_destination ? "forward" : "drop";
  line += '\t';
  if (action.emissions.empty()) {
    line += '-';
  } else {
    for (std::size_t i = 0; i < action.emissions.size(); ++i) {
      if (i > 0) line += ',';
      line += to_string(action.emissions[i].packet.mark);
      line += "->S";
      line += std::to_string(action.emissions[i].to);
    }
  }
  return line;
}

}  // namespace react
