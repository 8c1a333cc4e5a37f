#include "authtime/hash_chain.hpp"

#include <algorithm>

#include "authtime/crypto.hpp"
#include "authtime/errors.hpp"

namespace authtime {

HashChain HashChain::generate(const Digest32& seed, std::uint32_t length,
                              std::uint32_t anchor_period, ChainValidity validity,
                              std::size_t materialize_cap) {
  if (length == 0) throw InvalidParameter("chain length must be >= 1");
  if (anchor_period == 0 || anchor_period > length)
    throw InvalidParameter("anchor period must be in [1, N]");
  if (validity.end_us < validity.start_us)
    throw InvalidParameter("validity end precedes start");
  if (materialize_cap < 2) throw InvalidParameter("materialize cap must be >= 2");

  HashChain chain;
  chain.length_ = length;
  chain.anchor_period_ = anchor_period;
  chain.validity_ = validity;
  chain.seed_ = seed;

  const std::uint64_t total = static_cast<std::uint64_t>(length) + 1;
  std::uint32_t stride = 1;
  while (total / stride + 2 > materialize_cap) stride *= 2;
  chain.stride_ = stride;

  // Walk from h_N down to h_0, keeping h_N and every stride-th element.
  std::vector<Digest32> kept;
  kept.reserve(static_cast<std::size_t>(total / stride) + 2);
  Digest32 current = seed;  // h_N
  kept.push_back(current);
  for (std::uint32_t i = length; i-- > 0;) {
    current = sha256(current);  // now h_i
    if (i % stride == 0) kept.push_back(current);
  }
  std::reverse(kept.begin(), kept.end());
  chain.stored_ = std::move(kept);

  // Identifier derived from the public head of the chain.
  Digest32 head_hash = sha256(chain.stored_.front());
  std::copy_n(head_hash.begin(), chain.id_.size(), chain.id_.begin());
  return chain;
}

Digest32 HashChain::element(std::uint32_t index) const {
  if (index > length_) throw IndexOutOfChain("element index exceeds chain length");
  if (stride_ == 1) return stored_[index];
  // Nearest stored element at or above `index`, then hash down.
  std::uint32_t slot = (index + stride_ - 1) / stride_;
  std::uint32_t stored_index = slot * stride_;
  if (stored_index > length_) {
    stored_index = length_;
    slot = static_cast<std::uint32_t>(stored_.size() - 1);
  }
  Digest32 value = stored_[slot];
  for (std::uint32_t i = stored_index; i > index; --i) value = sha256(value);
  return value;
}

ElementCheck verify_element_against(const Digest32& candidate, std::uint32_t claimed_index,
                                    std::uint32_t trusted_index, const Digest32& trusted_value) {
  if (claimed_index < trusted_index)
    throw IndexOrder("claimed index precedes trusted anchor index");
  ElementCheck result;
  result.hash_ops = claimed_index - trusted_index;
  Digest32 walked = candidate;
  for (std::uint32_t i = 0; i < result.hash_ops; ++i) walked = sha256(walked);
  result.accepted = (walked == trusted_value);
  return result;
}

}  // namespace authtime
