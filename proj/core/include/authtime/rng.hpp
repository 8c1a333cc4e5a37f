#pragma once

#include <cstdint>

#include "authtime/bytes.hpp"

namespace authtime {

// splitmix64 step; used to derive independent child seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic generator with hand-rolled distributions so that sequences
// are reproducible independent of the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n);
  // Gaussian via Box-Muller.
  double normal(double mean, double stddev);
  Digest32 random_bytes32();
  void fill(std::span<std::uint8_t> out);

  // Child seed for stream `stream_id`, independent of draws on this Rng.
  std::uint64_t child_seed(std::uint64_t stream_id) const;

 private:
  std::uint64_t state_[4];
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace authtime
