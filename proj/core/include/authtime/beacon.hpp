#pragma once

#include <cstdint>
#include <optional>

#include "authtime/bytes.hpp"
#include "authtime/hash_chain.hpp"
#include "authtime/trust.hpp"

namespace authtime {

// Authenticated beacon payload. Stands in for the vendor-specific IE of an
// 802.11 beacon; the mandatory 8-octet timestamp is carried as timestamp_us.
//
// Wire layout, big-endian integers:
//   "ATB1" (4) | timestamp_us (8) | interval_tu (2) | ap_id (6) | chain_id (16)
//   | index (4) | mac (32) | disclosed_key (32) | flags (1)
//   | [anchor_len (2) | anchor] if flags bit0
//   | [cert_len (2) | cert]     if flags bit1
//   | vendor_tail (opaque, to end of frame)
struct BeaconFrame {
  std::uint64_t timestamp_us = 0;
  std::uint16_t beacon_interval_tu = 100;
  ApId ap_id{};
  ChainId chain_id{};
  std::uint32_t index = 0;  // n >= 1; the MAC is keyed with h_{n+1}
  Digest32 mac{};
  Digest32 disclosed_key{};  // h_n, the key for beacon n-1
  std::optional<SignedAnchor> anchor;
  std::optional<ApCertificate> certificate;
  Bytes vendor_tail;  // unknown trailing vendor tags, preserved opaque

  bool operator==(const BeaconFrame&) const = default;
};

// 802.11 frame budget the serialized payload must fit in.
inline constexpr std::size_t kMaxFrameOctets = 2320;

struct Attachments {
  std::optional<SignedAnchor> anchor;
  std::optional<ApCertificate> certificate;
};

// Canonical MAC input: timestamp, interval, ap_id, chain_id, index. The MAC
// itself, the disclosed key (checked via the chain walk instead) and the
// attachment blobs (independently signed) are excluded.
Bytes mac_message_bytes(const BeaconFrame& frame);

// Assembles beacon n with MAC keyed by h_{n+1} and h_n disclosed. Throws
// IndexOutOfChain unless 1 <= n <= N-1, OversizeFrame if attachments push the
// serialization past the frame budget.
BeaconFrame build_beacon(const HashChain& chain, std::uint32_t n, std::uint64_t timestamp_us,
                         std::uint16_t beacon_interval_tu, const ApId& ap_id,
                         const Attachments& attachments = {});

Bytes serialize(const BeaconFrame& frame);      // throws OversizeFrame
BeaconFrame deserialize(ByteView data);         // throws DecodeError with offset

}  // namespace authtime
