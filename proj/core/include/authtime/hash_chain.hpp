#pragma once

#include <cstdint>
#include <vector>

#include "authtime/bytes.hpp"

namespace authtime {

struct ChainValidity {
  std::uint64_t start_us = 0;
  std::uint64_t end_us = 0;
};

// One-way key chain h_0..h_N with h_i = SHA-256(h_{i+1}). h_N is the secret
// generation end; keys are disclosed in index order 1..N. h_0 and every
// multiple of the anchor period are anchor points eligible for signing.
class HashChain {
 public:
  // Elements are fully materialized up to this many entries; longer chains
  // keep checkpoints and recompute intermediate elements on demand.
  static constexpr std::size_t kDefaultMaterializeCap = 10'000'000;

  // Deterministic in all arguments. Throws InvalidParameter on N = 0 or an
  // anchor period outside [1, N].
  static HashChain generate(const Digest32& seed, std::uint32_t length,
                            std::uint32_t anchor_period, ChainValidity validity,
                            std::size_t materialize_cap = kDefaultMaterializeCap);

  const ChainId& id() const { return id_; }
  std::uint32_t length() const { return length_; }             // N
  std::uint32_t anchor_period() const { return anchor_period_; }  // P
  const ChainValidity& validity() const { return validity_; }
  const Digest32& seed() const { return seed_; }

  // h_index for index in [0, N]; throws IndexOutOfChain otherwise.
  Digest32 element(std::uint32_t index) const;

  bool fully_materialized() const { return stride_ == 1; }

 private:
  HashChain() = default;

  ChainId id_{};
  std::uint32_t length_ = 0;
  std::uint32_t anchor_period_ = 1;
  ChainValidity validity_{};
  Digest32 seed_{};
  // Stored values at indices 0, stride, 2*stride, ..., plus N.
  std::vector<Digest32> stored_;
  std::uint32_t stride_ = 1;
};

// Result of walking a candidate element back to a trusted one.
struct ElementCheck {
  bool accepted = false;
  std::uint32_t hash_ops = 0;  // k: SHA-256 applications performed
};

// Applies SHA-256 (claimed_index - trusted_index) times to `candidate` and
// compares with `trusted_value`. Throws IndexOrder when claimed_index is
// below the trusted index.
ElementCheck verify_element_against(const Digest32& candidate, std::uint32_t claimed_index,
                                    std::uint32_t trusted_index, const Digest32& trusted_value);

}  // namespace authtime
