#include "react/simulator.hpp"

#include <cmath>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <variant>
#include <vector>

#include "react/client_model.hpp"
#include "react/counting_bloom.hpp"
#include "react/protocol.hpp"

namespace react {

namespace {

constexpr std::uint32_t kServerIp = 0xc0000201;  // 192.0.2.1

struct NodeRef {
  enum class Kind : std::uint8_t { sw, server, client } kind;
  std::uint32_t index = 0;
};

struct EvPacketArrival {
  NodeRef at;
  Packet pkt;
};
struct EvClientTimeout {
  std::uint64_t tx;
  std::uint32_t attempt;
};
struct EvFilterRotation {
  std::uint32_t sw;
};
struct EvTableExpiry {
  std::uint32_t sw;
};
struct EvMetricsTick {};

using Payload =
    std::variant<EvPacketArrival, EvClientTimeout, EvFilterRotation, EvTableExpiry, EvMetricsTick>;

struct Event {
  double time;
  std::uint64_t seq;
  Payload payload;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

// Jaqen-style baseline: a single counting Bloom filter per switch, entries
// deleted by the responses themselves.
struct CbfSwitch {
  CountingBloomFilter filter;
  std::uint64_t responses_seen = 0;
  std::uint64_t unmatched_responses = 0;
};

class Simulator {
 public:
  Simulator(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options)
      : config_(config),
        options_(options),
        seed_(seed),
        request_stream_(config.traffic.r, mix64(seed ^ 0x72657175ULL)),
        attack_stream_(config.traffic.a, mix64(seed ^ 0x61747461ULL)),
        request_draw_(mix64(seed ^ 0x64726177ULL)),
        attack_draw_(mix64(seed ^ 0x76696374ULL)),
        jitter_(mix64(seed ^ 0x6a697474ULL)),
        routing_(mix64(seed ^ 0x726f7574ULL)),
        client_rng_(mix64(seed ^ 0x636c6e74ULL)),
        tracker_(config.traffic.txn_id_policy == "fresh" ? TxnIdPolicy::fresh_on_retry
                                                         : TxnIdPolicy::fixed_on_retry,
                 config.traffic.timeout, config.traffic.max_retries) {
    const unsigned n = config.topology.num_switches;
    const bool cbf = config.filter.engine == "cbf";
    for (unsigned i = 0; i < n; ++i) {
      if (cbf) {
        // The baseline gets the memory of one window: per_window_bits of
        // storage as 8-bit cells.
        const std::size_t cells = std::max<std::size_t>(2, config.filter.per_window_bits / 8);
        cbf_switches_.push_back({CountingBloomFilter(cells, config.filter.k, derive_seed(i)), 0, 0});
      } else {
        switches_.emplace_back(make_switch(i, n));
      }
    }

    // Per-prefix routing: requests always enter at switch 0; a coin decides
    // whether a prefix's responses come back there too or at a random other
    // switch. The flipped assignment is pre-drawn so enabling the mid-run
    // flip never perturbs the base draw.
    const auto& prefixes = config.traffic.client_prefixes;
    downstream_.resize(prefixes.size());
    downstream_flipped_.resize(prefixes.size());
    for (auto* table : {&downstream_, &downstream_flipped_}) {
      for (std::size_t i = 0; i < prefixes.size(); ++i) {
        const bool symmetric = routing_.next_double() < config.topology.symmetric_fraction;
        (*table)[i] =
            symmetric || n < 2 ? 0 : 1 + static_cast<std::uint32_t>(routing_.next_below(n - 1));
      }
    }

    bins_.resize(static_cast<std::size_t>(std::ceil(config.duration)));
    for (std::size_t i = 0; i < bins_.size(); ++i) bins_[i].t = static_cast<std::uint32_t>(i);
  }

  RunResult run() {
    schedule_housekeeping();
    const double duration = config_.duration;

    while (true) {
      const double queue_time = queue_.empty() ? -1.0 : queue_.top().time;
      const double request_time =
          request_stream_.active() && request_stream_.peek() < duration ? request_stream_.peek()
                                                                        : -1.0;
      const double attack_time =
          attack_stream_.active() && attack_stream_.peek() < duration ? attack_stream_.peek()
                                                                      : -1.0;

      int source = -1;
      double best = 0.0;
      if (queue_time >= 0.0 && queue_time <= duration) {
        source = 0;
        best = queue_time;
      }
      if (request_time >= 0.0 && (source < 0 || request_time < best)) {
        source = 1;
        best = request_time;
      }
      if (attack_time >= 0.0 && (source < 0 || attack_time < best)) {
        source = 2;
        best = attack_time;
      }
      if (source < 0) break;

      if (best < now_) throw std::logic_error("event processed out of order");
      now_ = best;

      if (source == 1) {
        spawn_request(request_stream_.pop());
      } else if (source == 2) {
        spawn_attack(attack_stream_.pop());
      } else {
        Event event = queue_.top();
        queue_.pop();
        dispatch(event);
      }
    }

    return assemble();
  }

 private:
  std::uint64_t derive_seed(std::uint64_t salt) const { return mix64(seed_ ^ (salt * 0x9e37ULL)); }

  SwitchState make_switch(unsigned index, unsigned count) const {
    std::vector<SwitchId> peers;
    for (unsigned i = 0; i < count; ++i) {
      if (i != index) peers.push_back(i);
    }
    SlidingWindowFilter filter(config_.filter.b, config_.filter.per_window_bits, config_.filter.k,
                               config_.filter.tau, derive_seed(index));
    ForwardedRequestsTable forwarded(config_.protocol.forwarded_requests_capacity,
                                     config_.protocol.forwarded_requests_ttl);
    SwitchModeConfig mode;
    mode.include_write_window_on_retrans_check = resolve_include_write_window();
    mode.ntp_mode = config_.protocol.ntp_mode;
    mode.peacetime_mode = config_.protocol.peacetime_mode;
    mode.unmatched_threshold = config_.protocol.unmatched_threshold;
    mode.prefix_len = config_.protocol.prefix_len;
    return SwitchState(static_cast<SwitchId>(index), std::move(peers), std::move(filter),
                       std::move(forwarded), mode);
  }

  bool resolve_include_write_window() const {
    const auto& policy = config_.filter.include_write_window_policy;
    if (policy == "include") return true;
    if (policy == "exclude") return false;
    // auto: skipping the write window is sound only when the client retry
    // arrives at least one rotation after the original request.
    return config_.traffic.timeout <= config_.filter.tau;
  }

  void schedule_housekeeping() {
    const double duration = config_.duration;
    if (config_.filter.engine == "react") {
      for (std::uint32_t i = 0; i < switches_.size(); ++i) {
        if (config_.filter.tau <= duration) {
          push(config_.filter.tau, EvFilterRotation{i});
        }
        if (config_.protocol.forwarded_requests_ttl <= duration) {
          push(config_.protocol.forwarded_requests_ttl, EvTableExpiry{i});
        }
      }
    }
    for (double t = 1.0; t <= duration; t += 1.0) push(t, EvMetricsTick{});
  }

  template <typename P>
  void push(double time, P payload) {
    queue_.push(Event{time, seq_++, Payload(std::move(payload))});
  }

  PerSecondRow& bin(double time) {
    std::size_t index = static_cast<std::size_t>(time);
    if (index >= bins_.size()) index = bins_.size() - 1;
    return bins_[index];
  }

  double link_delay(const LinkSampler& link) { return link.sample(jitter_); }

  LinkSampler client_switch_link() const {
    return {config_.topology.delays.client_switch, config_.topology.jitter};
  }
  LinkSampler switch_server_link() const {
    return {config_.topology.delays.switch_server, config_.topology.jitter};
  }
  LinkSampler inter_switch_link() const {
    return {config_.topology.delays.inter_switch, config_.topology.jitter};
  }

  std::uint32_t draw_client_ip(Rng& rng) const {
    const auto& prefixes = config_.traffic.client_prefixes;
    const auto& prefix = prefixes[rng.next_below(prefixes.size())];
    return prefix.addr | (rng.next_u32() & ~prefix_mask(prefix.len));
  }

  std::uint32_t downstream_switch(std::uint32_t client_ip) const {
    const auto& prefixes = config_.traffic.client_prefixes;
    const bool flipped =
        config_.topology.route_flip_time > 0 && now_ >= config_.topology.route_flip_time;
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      if (mask_address(client_ip, prefixes[i].len) == prefixes[i].addr) {
        return flipped ? downstream_flipped_[i] : downstream_[i];
      }
    }
    return 0;
  }

  void send_request_packet(const TxnKey& key) {
    Packet pkt;
    pkt.dir = Direction::request;
    pkt.src = key.client_ip;
    pkt.dst = kServerIp;
    pkt.txn_id = key.txn_id;
    push(now_ + link_delay(client_switch_link()), EvPacketArrival{{NodeRef::Kind::sw, 0}, pkt});
  }

  void spawn_request(double at) {
    now_ = at;
    const TxnKey key{request_draw_.next_u16(), draw_client_ip(request_draw_)};
    const auto started = tracker_.start(key, now_);
    ++bin(now_).requests_sent;
    send_request_packet(key);
    push(now_ + config_.traffic.timeout, EvClientTimeout{started.tx, started.attempt});
  }

  void spawn_attack(double at) {
    now_ = at;
    Packet pkt;
    pkt.dir = Direction::response;
    pkt.src = kServerIp;
    pkt.dst = draw_client_ip(attack_draw_);
    pkt.txn_id = attack_draw_.next_u16();
    pkt.attack = true;
    std::uint32_t ingress = 0;
    if (config_.traffic.attack_ingress == "any") {
      ingress = static_cast<std::uint32_t>(attack_draw_.next_below(config_.topology.num_switches));
    } else {
      ingress = static_cast<std::uint32_t>(std::strtoul(config_.traffic.attack_ingress.c_str(),
                                                        nullptr, 10));
    }
    push(now_, EvPacketArrival{{NodeRef::Kind::sw, ingress}, pkt});
  }

  void dispatch(const Event& event) {
    std::visit([this](const auto& payload) { handle(payload); }, event.payload);
  }

  void handle(const EvPacketArrival& arrival) {
    switch (arrival.at.kind) {
      case NodeRef::Kind::sw:
        at_switch(arrival.at.index, arrival.pkt);
        break;
      case NodeRef::Kind::server:
        at_server(arrival.pkt);
        break;
      case NodeRef::Kind::client:
        tracker_.on_response(arrival.pkt.key());
        break;
    }
  }

  void at_switch(std::uint32_t index, const Packet& pkt) {
    if (config_.filter.engine == "cbf") {
      at_cbf_switch(index, pkt);
      return;
    }
    SwitchState& sw = switches_[index];
    const auto& counters = sw.counters();
    const std::uint64_t broadcasts_before = counters.broadcasts_emitted;
    const std::uint64_t rules_before = counters.rules_installed;

    const SwitchAction action = pkt.dir == Direction::request ? sw.handle_request(pkt, now_)
                                                              : sw.handle_response(pkt, now_);

    bin(now_).broadcasts += counters.broadcasts_emitted - broadcasts_before;
    bin(now_).rules_installed += counters.rules_installed - rules_before;

    if (options_.trace != nullptr) {
      *options_.trace << format_trace_line(now_, sw.id(), pkt, action) << '\n';
    }

    if (action.verdict == Verdict::forward_to_destination) {
      if (pkt.dir == Direction::request) {
        push(now_ + config_.topology.delays.server_service + link_delay(switch_server_link()),
             EvPacketArrival{{NodeRef::Kind::server, 0}, pkt});
      } else {
        classify_response(pkt, /*delivered=*/true);
        push(now_ + link_delay(client_switch_link()),
             EvPacketArrival{{NodeRef::Kind::client, 0}, pkt});
      }
    } else if (pkt.dir == Direction::response && pkt.mark.kind == MarkKind::none) {
      classify_response(pkt, /*delivered=*/false);
    }

    for (const Emission& emission : action.emissions) {
      push(now_ + link_delay(inter_switch_link()),
           EvPacketArrival{{NodeRef::Kind::sw, emission.to}, emission.packet});
    }
  }

  void at_cbf_switch(std::uint32_t index, const Packet& pkt) {
    CbfSwitch& sw = cbf_switches_[index];
    SwitchAction action;
    if (pkt.dir == Direction::request) {
      sw.filter.insert(pkt.key());
      action.verdict = Verdict::forward_to_destination;
      push(now_ + config_.topology.delays.server_service + link_delay(switch_server_link()),
           EvPacketArrival{{NodeRef::Kind::server, 0}, pkt});
    } else {
      ++sw.responses_seen;
      if (sw.filter.check_and_decrement(pkt.key())) {
        action.verdict = Verdict::forward_to_destination;
        classify_response(pkt, true);
        push(now_ + link_delay(client_switch_link()),
             EvPacketArrival{{NodeRef::Kind::client, 0}, pkt});
      } else {
        ++sw.unmatched_responses;
        classify_response(pkt, false);
      }
    }
    if (options_.trace != nullptr) {
      *options_.trace << format_trace_line(now_, index, pkt, action) << '\n';
    }
  }

  void classify_response(const Packet& pkt, bool delivered) {
    if (pkt.mark.kind != MarkKind::none) return;
    auto& row = bin(now_);
    if (pkt.attack) {
      delivered ? ++row.attack_delivered : ++row.attack_dropped;
    } else {
      delivered ? ++row.legit_delivered : ++row.legit_dropped;
    }
  }

  void at_server(const Packet& request) {
    Packet response;
    response.dir = Direction::response;
    response.src = kServerIp;
    response.dst = request.src;
    response.txn_id = request.txn_id;
    ++responses_generated_;
    const std::uint32_t sw = downstream_switch(response.dst);
    push(now_ + link_delay(switch_server_link()), EvPacketArrival{{NodeRef::Kind::sw, sw}, response});
  }

  void handle(const EvClientTimeout& timeout) {
    const auto retry = tracker_.on_timeout(timeout.tx, timeout.attempt, now_, client_rng_);
    if (!retry) return;
    auto& row = bin(now_);
    ++row.requests_sent;
    ++row.retransmissions;
    send_request_packet(retry->key);
    push(now_ + config_.traffic.timeout, EvClientTimeout{timeout.tx, retry->attempt});
  }

  void handle(const EvFilterRotation& rotation) {
    switches_[rotation.sw].rotate_filter(now_);
    ++filter_rotations_;
    const double next = static_cast<double>(switches_[rotation.sw].filter().rotation_count() + 1) *
                        config_.filter.tau;
    if (next <= config_.duration) push(next, EvFilterRotation{rotation.sw});
  }

  void handle(const EvTableExpiry& expiry) {
    switches_[expiry.sw].expire_forwarded_requests(now_);
    const double next = now_ + config_.protocol.forwarded_requests_ttl;
    if (next <= config_.duration) push(next, EvTableExpiry{expiry.sw});
  }

  void handle(const EvMetricsTick&) {
    for (const auto& sw : switches_) {
      max_forwarded_requests_ = std::max(max_forwarded_requests_, sw.forwarded_requests().size());
    }
  }

  RunResult assemble() {
    RunResult result;
    result.per_second = bins_;
    result.seed = seed_;
    result.config_echo = flatten_config(config_);

    RunSummary& summary = result.summary;
    summary.totals = totals_over(bins_, 0.0, static_cast<double>(bins_.size()) + 1.0);
    summary.transactions_started = tracker_.started();
    summary.transactions_resolved = tracker_.resolved();
    summary.transactions_failed = tracker_.failed();
    summary.duplicate_responses = tracker_.duplicates();
    summary.filter_rotations = filter_rotations_;
    summary.responses_generated = responses_generated_;
    summary.max_forwarded_requests = max_forwarded_requests_;
    for (const auto& sw : switches_) {
      const auto& c = sw.counters();
      summary.forward_copies += c.forward_copies_emitted;
      summary.rule_install_copies += c.rule_install_copies_emitted;
      summary.response_broadcasts += c.response_broadcasts_emitted;
      summary.protocol_errors += c.protocol_errors;
      summary.capacity_evictions +=
          sw.forwarded_requests().capacity_evictions() + sw.forwarding_table().evictions();
    }
    return result;
  }

  const ScenarioConfig& config_;
  const RunOptions& options_;
  std::uint64_t seed_;

  PoissonStream request_stream_;
  PoissonStream attack_stream_;
  Rng request_draw_;
  Rng attack_draw_;
  Rng jitter_;
  Rng routing_;
  Rng client_rng_;

  std::vector<SwitchState> switches_;
  std::vector<CbfSwitch> cbf_switches_;
  std::vector<std::uint32_t> downstream_;
  std::vector<std::uint32_t> downstream_flipped_;
  TransactionTracker tracker_;

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t seq_ = 0;
  double now_ = 0.0;
  std::vector<PerSecondRow> bins_;
  std::uint64_t filter_rotations_ = 0;
  std::uint64_t responses_generated_ = 0;
  std::size_t max_forwarded_requests_ = 0;
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, std::uint64_t seed,
                       const RunOptions& options) {
  const auto violations = validate_config(config);
  if (has_errors(violations)) {
    std::string message = "invalid scenario:";
    for (const auto& violation : violations) {
      if (violation.severity == Violation::Severity::error) {
        message += "\n  " + violation.message;
      }
    }
    throw std::invalid_argument(message);
  }
  Simulator sim(config, seed, options);
  return sim.run();
}

}  // namespace react
