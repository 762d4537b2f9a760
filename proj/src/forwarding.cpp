#include "react/forwarding.hpp"

#include <algorithm>
#include <cstdio>

namespace react {

std::string format_ipv4(std::uint32_t addr) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (addr >> 24) & 0xff, (addr >> 16) & 0xff,
                (addr >> 8) & 0xff, addr & 0xff);
  return buf;
}

bool parse_ipv4(const std::string& text, std::uint32_t& addr) {
  unsigned a, b, c, d;
  char tail;
  if (std::sscanf(text.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &tail) != 4) return false;
  if (a > 255 || b > 255 || c > 255 || d > 255) return false;
  addr = (a << 24) | (b << 16) | (c << 8) | d;
  return true;
}

bool RequestForwardingTable::install(std::uint32_t addr, unsigned prefix_len, SwitchId target,
                                     double now) {
  const std::uint32_t key = mask_address(addr, prefix_len);
  auto& rules = by_len_[prefix_len];
  auto it = rules.find(key);
  if (it == rules.end()) {
    if (size_ >= capacity_) evict_oldest();
    Rule rule;
    rule.targets.push_back(target);
    rule.installed_at = now;
    rules.emplace(key, std::move(rule));
    ++size_;
    return true;
  }
  auto& targets = it->second.targets;
  auto pos = std::lower_bound(targets.begin(), targets.end(), target);
  if (pos != targets.end() && *pos == target) return false;
  targets.insert(pos, target);
  return true;
}

std::span<const SwitchId> RequestForwardingTable::lookup(std::uint32_t addr) const {
  for (int len = 32; len >= 0; --len) {
    const auto& rules = by_len_[len];
    if (rules.empty()) continue;
    auto it = rules.find(mask_address(addr, static_cast<unsigned>(len)));
    if (it != rules.end()) return it->second.targets;
  }
  return {};
}

void RequestForwardingTable::evict_oldest() {
  int oldest_len = -1;
  std::uint32_t oldest_key = 0;
  double oldest_time = 0.0;
  for (int len = 0; len <= 32; ++len) {
    for (const auto& [key, rule] : by_len_[len]) {
      if (oldest_len < 0 || rule.installed_at < oldest_time) {
        oldest_len = len;
        oldest_key = key;
        oldest_time = rule.installed_at;
      }
    }
  }
  if (oldest_len >= 0) {
    by_len_[oldest_len].erase(oldest_key);
    --size_;
    ++evictions_;
  }
}

void ForwardedRequestsTable::append(std::uint16_t txn_id, SwitchId origin, double now) {
  auto it = entries_.find(txn_id);
  if (it != entries_.end()) {
    const bool stale = now - it->second.inserted_at >= ttl_;
    auto& origins = it->second.origins;
    if (stale) origins.clear();
    if (!stale && std::find(origins.begin(), origins.end(), origin) != origins.end()) {
      return;  // duplicate origin: no-op, no refresh
    }
    origins.push_back(origin);
    it->second.inserted_at = now;
    order_.emplace_back(now, txn_id);
    return;
  }
  if (entries_.size() >= capacity_) {
    expire(now);
    if (entries_.size() >= capacity_) evict_oldest_live();
  }
  Entry entry;
  entry.origins.push_back(origin);
  entry.inserted_at = now;
  entries_.emplace(txn_id, std::move(entry));
  order_.emplace_back(now, txn_id);
}

std::span<const SwitchId> ForwardedRequestsTable::lookup(std::uint16_t txn_id, double now) const {
  auto it = entries_.find(txn_id);
  if (it == entries_.end()) return {};
  if (now - it->second.inserted_at >= ttl_) return {};
  return it->second.origins;
}

std::size_t ForwardedRequestsTable::expire(double now) {
  std::size_t removed = 0;
  while (!order_.empty() && now - order_.front().first >= ttl_) {
    const auto [time, txn_id] = order_.front();
    order_.pop_front();
    auto it = entries_.find(txn_id);
    if (it != entries_.end() && it->second.inserted_at == time) {
      entries_.erase(it);
      ++removed;
    }
  }
  return removed;
}

void ForwardedRequestsTable::evict_oldest_live() {
  while (!order_.empty()) {
    const auto [time, txn_id] = order_.front();
    order_.pop_front();
    auto it = entries_.find(txn_id);
    if (it != entries_.end() && it->second.inserted_at == time) {
      entries_.erase(it);
      ++capacity_evictions_;
      return;
    }
  }
}

}  // namespace react
