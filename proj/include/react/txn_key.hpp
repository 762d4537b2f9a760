#pragma once

#include <cstdint>
#include <functional>

#include "react/rng.hpp"

namespace react {

// Joinable identity of a transaction: the protocol transaction ID paired
// with the client IP (source of the request, destination of the response).
struct TxnKey {
  std::uint16_t txn_id = 0;
  std::uint32_t client_ip = 0;

  // 16-bit ID concatenated with the 32-bit IPv4 address, big-endian:
  // 48 significant bits.
  std::uint64_t packed() const {
    return (static_cast<std::uint64_t>(txn_id) << 32) | client_ip;
  }

  friend bool operator==(const TxnKey&, const TxnKey&) = default;
};

// Double hashing shared by all filters: two keyed 64-bit digests of the
// packed key, combined as index_i = (h1 + i*h2) mod m. h2 is forced odd so
// the probe sequence never degenerates under a power-of-two modulus.
struct DoubleHash {
  std::uint64_t h1;
  std::uint64_t h2;

  static DoubleHash of(const TxnKey& key, std::uint64_t seed_a, std::uint64_t seed_b) {
    const std::uint64_t packed = key.packed();
    return {mix64(packed ^ seed_a), mix64(packed ^ seed_b) | 1ULL};
  }

  std::size_t index(unsigned i, std::size_t mask) const {
    return static_cast<std::size_t>(h1 + i * h2) & mask;
  }
};

}  // namespace react

template <>
struct std::hash<react::TxnKey> {
  std::size_t operator()(const react::TxnKey& key) const noexcept {
    return std::hash<std::uint64_t>{}(key.packed());
  }
};
