#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

namespace fracindex {

// Stateless counter-based generator: every variate is a pure function of
// (key, counter), so parallel generation and replay are order-independent.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  static std::uint64_t derive(std::uint64_t a, std::uint64_t b) { return mix(mix(a) ^ b); }

  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ ^ mix(counter + 1)); }

  // Uniform on (0, 1).
  double uniform(std::uint64_t counter) const {
    return ((bits(counter) >> 11) + 0.5) * 0x1p-53;
  }

  // Standard normal via Box-Muller on counters (2c, 2c+1).
  double gaussian(std::uint64_t counter) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

// Order-insensitive FNV-1a over raw double bits, for hierarchical seeding.
class ByteHasher {
 public:
  void add(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    add(bits);
  }
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      state_ ^= (v >> (8 * i)) & 0xffu;
      state_ *= 0x100000001b3ull;
    }
  }
  void add(const std::vector<double>& vs) {
    for (double v : vs) add(v);
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

}  // namespace fracindex
