#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "react/bloom_filter.hpp"

namespace react {

// b Bloom filters rotating through write/read/clean roles every tau seconds.
//
// With b >= 3, exactly one window accepts writes, the window that becomes
// the write window at the next rotation is the clean window (never
// consulted by checks), and the rest are read-only. A key inserted at t'
// stays queryable for every t with t' in (t - tau*(b-2), t], and expires by
// t - t' >= tau*(b-1) absent colliding insertions.
//
// With b == 2 there is no clean phase: rotation zeroes the stale window and
// makes it the write window, so retention runs one interval longer (a key
// expires by t - t' >= 2*tau).
//
// Rotation is driven externally (the simulator's rotation event); insert
// and check never rotate on their own.
class SlidingWindowFilter {
 public:
  SlidingWindowFilter(unsigned window_count, std::size_t bits_per_window, unsigned hash_count,
                      double rotation_interval, std::uint64_t seed)
      : tau_(rotation_interval) {
    if (window_count < 2) {
      throw std::invalid_argument("SlidingWindowFilter: need at least two windows");
    }
    if (rotation_interval <= 0.0) {
      throw std::invalid_argument("SlidingWindowFilter: rotation interval must be positive");
    }
    windows_.reserve(window_count);
    for (unsigned i = 0; i < window_count; ++i) {
      // All windows share the same index functions, as a hardware pipeline
      // with fixed hash units would.
      windows_.emplace_back(bits_per_window, hash_count, seed);
    }
  }

  void insert(const TxnKey& key, double now) {
    (void)now;  // pre: now >= last_rotation_time; rotation is event-driven
    windows_[write_].insert(key);
  }

  // True iff the key tests positive in any read window, or in the write
  // window when include_write_window is set. The clean window is never
  // consulted.
  bool check(const TxnKey& key, double now, bool include_write_window) const {
    (void)now;
    const std::size_t b = windows_.size();
    const std::size_t clean = clean_index();
    for (std::size_t i = 0; i < b; ++i) {
      if (b >= 3 && i == clean) continue;
      if (i == write_ && !include_write_window) continue;
      if (windows_[i].check(key)) return true;
    }
    return false;
  }

  // Advances roles: the entering window is zeroed and becomes the write
  // window; the former write window becomes read-only.
  void rotate(double now) {
    write_ = (write_ + 1) % windows_.size();
    windows_[write_].clear();
    ++rotations_;
    last_rotation_ = now;
  }

  unsigned window_count() const { return static_cast<unsigned>(windows_.size()); }
  double rotation_interval() const { return tau_; }
  std::uint64_t rotation_count() const { return rotations_; }
  double last_rotation_time() const { return last_rotation_; }
  std::size_t write_index() const { return write_; }
  bool has_clean_window() const { return windows_.size() >= 3; }
  std::size_t clean_index() const { return (write_ + 1) % windows_.size(); }

  const BloomFilter& window(std::size_t i) const { return windows_[i]; }

  // One line per window: role and set-bit count.
  std::string debug_dump() const {
    std::string out;
    for (std::size_t i = 0; i < windows_.size(); ++i) {
      const char* role = "read";
      if (i == write_) {
        role = "write";
      } else if (has_clean_window() && i == clean_index()) {
        role = "clean";
      }
      out += role;
      out += ' ';
      out += std::to_string(windows_[i].set_bit_count());
      out += '\n';
    }
    return out;
  }

  friend bool operator==(const SlidingWindowFilter&, const SlidingWindowFilter&) = default;

 private:
  std::vector<BloomFilter> windows_;
  double tau_;
  std::size_t write_ = 0;
  std::uint64_t rotations_ = 0;
  double last_rotation_ = 0.0;
};

}  // namespace react
