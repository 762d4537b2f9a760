#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "react/txn_key.hpp"

namespace react {

// Counting Bloom filter baseline: responses delete their request's entry by
// decrementing the matched counters. 8-bit cells saturate at 255 instead of
// wrapping; decrementing a zero cell is a no-op.
class CountingBloomFilter {
 public:
  CountingBloomFilter(std::size_t cell_count, unsigned hash_count, std::uint64_t seed)
      : cells_(cell_count, 0),
        mask_(cell_count - 1),
        k_(hash_count),
        seed_a_(mix64(seed)),
        seed_b_(mix64(seed ^ 0x5bf0'3635'dcf2'6be1ULL)) {
    if (cell_count < 2 || (cell_count & (cell_count - 1)) != 0) {
      throw std::invalid_argument("CountingBloomFilter: cell count must be a power of two >= 2");
    }
    if (hash_count == 0) {
      throw std::invalid_argument("CountingBloomFilter: hash count must be >= 1");
    }
  }

  void insert(const TxnKey& key) {
    const auto h = DoubleHash::of(key, seed_a_, seed_b_);
    for (unsigned i = 0; i < k_; ++i) {
      std::uint8_t& cell = cells_[h.index(i, mask_)];
      if (cell < 255) ++cell;
    }
  }

  // If all k indexed counters are positive, decrements them and returns
  // true; otherwise returns false and mutates nothing.
  bool check_and_decrement(const TxnKey& key) {
    const auto h = DoubleHash::of(key, seed_a_, seed_b_);
    for (unsigned i = 0; i < k_; ++i) {
      if (cells_[h.index(i, mask_)] == 0) return false;
    }
    for (unsigned i = 0; i < k_; ++i) {
      std::uint8_t& cell = cells_[h.index(i, mask_)];
      if (cell > 0) --cell;
    }
    return true;
  }

  void clear() { std::fill(cells_.begin(), cells_.end(), 0); }

  std::size_t cell_count() const { return cells_.size(); }
  unsigned hash_count() const { return k_; }
  std::uint8_t cell(std::size_t i) const { return cells_[i]; }

  std::uint64_t counter_sum() const {
    return std::accumulate(cells_.begin(), cells_.end(), std::uint64_t{0});
  }

  std::vector<std::size_t> indices(const TxnKey& key) const {
    const auto h = DoubleHash::of(key, seed_a_, seed_b_);
    std::vector<std::size_t> out(k_);
    for (unsigned i = 0; i < k_; ++i) out[i] = h.index(i, mask_);
    return out;
  }

  friend bool operator==(const CountingBloomFilter&, const CountingBloomFilter&) = default;

 private:
  std::vector<std::uint8_t> cells_;
  std::size_t mask_;
  unsigned k_;
  std::uint64_t seed_a_;
  std::uint64_t seed_b_;
};

}  // namespace react
