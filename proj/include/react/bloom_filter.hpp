#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "react/txn_key.hpp"

namespace react {

// Plain Bloom filter over TxnKeys. The bit count must be a power of two so
// index reduction is a mask. A key that was inserted and not cleared always
// tests positive.
class BloomFilter {
 public:
  BloomFilter(std::size_t bit_count, unsigned hash_count, std::uint64_t seed)
      : words_((bit_count + 63) / 64, 0),
        mask_(bit_count - 1),
        bit_count_(bit_count),
        k_(hash_count),
        seed_a_(mix64(seed)),
        seed_b_(mix64(seed ^ 0x5bf0'3635'dcf2'6be1ULL)) {
    if (bit_count < 64 || (bit_count & (bit_count - 1)) != 0) {
      throw std::invalid_argument("BloomFilter: bit count must be a power of two >= 64");
    }
    if (hash_count == 0) {
      throw std::invalid_argument("BloomFilter: hash count must be >= 1");
    }
  }

  void insert(const TxnKey& key) {
    const auto h = DoubleHash::of(key, seed_a_, seed_b_);
    for (unsigned i = 0; i < k_; ++i) {
      const std::size_t idx = h.index(i, mask_);
      words_[idx >> 6] |= 1ULL << (idx & 63);
    }
  }

  bool check(const TxnKey& key) const {
    const auto h = DoubleHash::of(key, seed_a_, seed_b_);
    for (unsigned i = 0; i < k_; ++i) {
      const std::size_t idx = h.index(i, mask_);
      if ((words_[idx >> 6] & (1ULL << (idx & 63))) == 0) return false;
    }
    return true;
  }

  void clear() { std::fill(words_.begin(), words_.end(), 0ULL); }

  std::size_t bit_count() const { return bit_count_; }
  unsigned hash_count() const { return k_; }

  std::size_t set_bit_count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  // The k probe indices for a key; used by tests and collision searches.
  std::vector<std::size_t> indices(const TxnKey& key) const {
    const auto h = DoubleHash::of(key, seed_a_, seed_b_);
    std::vector<std::size_t> out(k_);
    for (unsigned i = 0; i < k_; ++i) out[i] = h.index(i, mask_);
    return out;
  }

  friend bool operator==(const BloomFilter&, const BloomFilter&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t mask_;
  std::size_t bit_count_;
  unsigned k_;
  std::uint64_t seed_a_;
  std::uint64_t seed_b_;
};

}  // namespace react
