#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace react {

using SwitchId = std::uint32_t;

inline std::uint32_t prefix_mask(unsigned len) {
  return len == 0 ? 0 : ~std::uint32_t{0} << (32 - len);
}

inline std::uint32_t mask_address(std::uint32_t addr, unsigned len) {
  return addr & prefix_mask(len);
}

std::string format_ipv4(std::uint32_t addr);
bool parse_ipv4(const std::string& text, std::uint32_t& addr);

// Maps IPv4 prefixes to the downstream switches that should receive request
// copies. Lookup is longest-prefix match; a miss yields no targets.
// Installing a target for an existing prefix unions it into the set
// (multicast semantics). At capacity the oldest rule is evicted.
class RequestForwardingTable {
 public:
  explicit RequestForwardingTable(std::size_t capacity = 1 << 20) : capacity_(capacity) {}

  // Returns true when the table changed (new prefix or new target).
  bool install(std::uint32_t addr, unsigned prefix_len, SwitchId target, double now);

  // Targets of the longest matching prefix, sorted; empty on miss.
  std::span<const SwitchId> lookup(std::uint32_t addr) const;

  std::size_t size() const { return size_; }
  std::uint64_t evictions() const { return evictions_; }

 private:
  struct Rule {
    std::vector<SwitchId> targets;  // sorted, unique
    double installed_at = 0.0;
  };

  void evict_oldest();

  std::array<std::unordered_map<std::uint32_t, Rule>, 33> by_len_;
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::uint64_t evictions_ = 0;
};

// Bounded record of which switches broadcast each transaction ID. Entries
// expire after ttl seconds and are never returned stale; at capacity the
// oldest live entry is evicted.
class ForwardedRequestsTable {
 public:
  ForwardedRequestsTable(std::size_t capacity, double ttl) : capacity_(capacity), ttl_(ttl) {}

  // Appends an origin for txn_id. Appending an origin already present is a
  // no-op; adding a new origin refreshes the entry's insertion time.
  void append(std::uint16_t txn_id, SwitchId origin, double now);

  // Origins recorded for txn_id, or empty if absent or older than ttl.
  std::span<const SwitchId> lookup(std::uint16_t txn_id, double now) const;

  // Drops every entry whose insertion time is <= now - ttl; returns how
  // many were dropped.
  std::size_t expire(double now);

  std::size_t size() const { return entries_.size(); }
  double ttl() const { return ttl_; }
  std::uint64_t capacity_evictions() const { return capacity_evictions_; }

 private:
  struct Entry {
    std::vector<SwitchId> origins;
    double inserted_at = 0.0;
  };

  void evict_oldest_live();

  std::unordered_map<std::uint16_t, Entry> entries_;
  // Insertion log for amortized oldest-first eviction; stale records are
  // skipped when their timestamp no longer matches the live entry.
  std::deque<std::pair<double, std::uint16_t>> order_;
  std::size_t capacity_;
  double ttl_;
  std::uint64_t capacity_evictions_ = 0;
};

}  // namespace react
