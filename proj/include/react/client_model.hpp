#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "react/rng.hpp"
#include "react/txn_key.hpp"

namespace react {

enum class TxnIdPolicy : std::uint8_t {
  fixed_on_retry,  // DNS-like: the retry reuses the transaction ID
  fresh_on_retry,  // NTP-like: every retry draws a new ID
};

// Tracks every outstanding client transaction: pending keys, retry budget,
// and what happened to each response that comes back. A transaction
// resolves at most once; later answers count as duplicates.
class TransactionTracker {
 public:
  TransactionTracker(TxnIdPolicy policy, double timeout, unsigned max_retries)
      : policy_(policy), timeout_(timeout), max_retries_(max_retries) {}

  struct Started {
    std::uint64_t tx = 0;
    std::uint32_t attempt = 0;
  };

  Started start(const TxnKey& key, double now) {
    const std::uint64_t tx = transactions_.size();
    transactions_.push_back({key, now, 0, false});
    live_by_key_[key] = tx;
    ++started_;
    return {tx, 0};
  }

  enum class DeliveryOutcome { resolved, duplicate, unsolicited };

  DeliveryOutcome on_response(const TxnKey& key) {
    auto it = live_by_key_.find(key);
    if (it == live_by_key_.end()) {
      ++unsolicited_;
      return DeliveryOutcome::unsolicited;
    }
    Transaction& tx = transactions_[it->second];
    if (tx.resolved) {
      ++duplicates_;
      return DeliveryOutcome::duplicate;
    }
    tx.resolved = true;
    ++resolved_;
    return DeliveryOutcome::resolved;
  }

  struct Retransmission {
    TxnKey key;
    std::uint32_t attempt = 0;
  };

  // Fires when a (re)transmission's timeout elapses unanswered. Returns the
  // retransmitted request, or nothing when the timer is stale, the
  // transaction resolved, or the retry budget ran out.
  std::optional<Retransmission> on_timeout(std::uint64_t tx_index, std::uint32_t attempt,
                                           double now, Rng& rng) {
    Transaction& tx = transactions_[tx_index];
    if (tx.resolved || tx.attempt != attempt) return std::nullopt;
    if (tx.attempt >= max_retries_) {
      ++failed_;
      auto it = live_by_key_.find(tx.key);
      if (it != live_by_key_.end() && it->second == tx_index) live_by_key_.erase(it);
      return std::nullopt;
    }
    ++tx.attempt;
    if (policy_ == TxnIdPolicy::fresh_on_retry) {
      auto it = live_by_key_.find(tx.key);
      if (it != live_by_key_.end() && it->second == tx_index) live_by_key_.erase(it);
      tx.key.txn_id = rng.next_u16();
      live_by_key_[tx.key] = tx_index;
    }
    tx.last_send = now;
    ++retransmissions_;
    return Retransmission{tx.key, tx.attempt};
  }

  double timeout() const { return timeout_; }
  std::uint64_t started() const { return started_; }
  std::uint64_t resolved() const { return resolved_; }
  std::uint64_t failed() const { return failed_; }
  std::uint64_t duplicates() const { return duplicates_; }
  std::uint64_t unsolicited() const { return unsolicited_; }
  std::uint64_t retransmissions() const { return retransmissions_; }

 private:
  struct Transaction {
    TxnKey key;
    double last_send = 0.0;
    std::uint32_t attempt = 0;
    bool resolved = false;
  };

  TxnIdPolicy policy_;
  double timeout_;
  unsigned max_retries_;
  std::vector<Transaction> transactions_;
  std::unordered_map<TxnKey, std::uint64_t> live_by_key_;
  std::uint64_t started_ = 0;
  std::uint64_t resolved_ = 0;
  std::uint64_t failed_ = 0;
  std::uint64_t duplicates_ = 0;
  std::uint64_t unsolicited_ = 0;
  std::uint64_t retransmissions_ = 0;
};

// Per-packet link latency: uniform jitter around the base delay, clamped at
// zero.
struct LinkSampler {
  double base = 0.0;
  double jitter = 0.0;

  double sample(Rng& rng) const {
    const double delay = jitter > 0 ? rng.uniform(base - jitter, base + jitter) : base;
    return delay < 0.0 ? 0.0 : delay;
  }
};

// Poisson arrival stream: exponential inter-arrival times at a fixed mean
// rate. A zero rate never fires.
class PoissonStream {
 public:
  PoissonStream(double rate, std::uint64_t seed) : rate_(rate), rng_(seed) {
    next_ = rate_ > 0 ? rng_.exponential(rate_) : -1.0;
  }

  bool active() const { return next_ >= 0.0; }
  double peek() const { return next_; }

  double pop() {
    const double at = next_;
    next_ += rng_.exponential(rate_);
    return at;
  }

  Rng& rng() { return rng_; }

 private:
  double rate_;
  Rng rng_;
  double next_;
};

}  // namespace react
