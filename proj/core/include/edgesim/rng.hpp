#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace edgesim {

// FNV-1a; std::hash is not portable and the same label must always map to
// the same stream.
std::uint64_t fnv1a64(std::string_view s);

// Stateless 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

// Top 53 bits to a double in [0, 1).
double unit_from_bits(std::uint64_t bits);

// A labeled deterministic random stream. Same (root_seed, label) always
// yields the same draw sequence, independent of any other stream.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::string_view label);

  std::uint64_t next_u64() { return engine_(); }
  double uniform01() { return unit_from_bits(engine_()); }
  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Inclusive bounds; modulo bias is irrelevant at the ranges used here.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p) { return uniform01() < p; }

  std::uint64_t root_seed() const { return root_seed_; }
  const std::string& label() const { return label_; }

 private:
  std::uint64_t root_seed_;
  std::string label_;
  std::mt19937_64 engine_;
};

inline RngStream fork_rng(std::uint64_t root_seed, std::string_view label) {
  return RngStream(root_seed, label);
}

}  // namespace edgesim
