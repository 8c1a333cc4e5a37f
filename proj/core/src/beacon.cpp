#include "authtime/beacon.hpp"

#include "authtime/crypto.hpp"
#include "authtime/errors.hpp"

namespace authtime {

namespace {

constexpr std::uint8_t kMagic[4] = {'A', 'T', 'B', '1'};
constexpr std::uint8_t kFlagAnchor = 0x01;
constexpr std::uint8_t kFlagCert = 0x02;

}  // namespace

Bytes mac_message_bytes(const BeaconFrame& frame) {
  Bytes out;
  out.reserve(36);
  put_u64(out, frame.timestamp_us);
  put_u16(out, frame.beacon_interval_tu);
  put_bytes(out, frame.ap_id);
  put_bytes(out, frame.chain_id);
  put_u32(out, frame.index);
  return out;
}

BeaconFrame build_beacon(const HashChain& chain, std::uint32_t n, std::uint64_t timestamp_us,
                         std::uint16_t beacon_interval_tu, const ApId& ap_id,
                         const Attachments& attachments) {
  if (n == 0 || n >= chain.length())
    throw IndexOutOfChain("beacon index must be in [1, N-1]");
  BeaconFrame frame;
  frame.timestamp_us = timestamp_us;
  frame.beacon_interval_tu = beacon_interval_tu;
  frame.ap_id = ap_id;
  frame.chain_id = chain.id();
  frame.index = n;
  frame.disclosed_key = chain.element(n);
  frame.anchor = attachments.anchor;
  frame.certificate = attachments.certificate;
  Digest32 mac_key = chain.element(n + 1);
  frame.mac = hmac_sha256(mac_key, mac_message_bytes(frame));
  // Serialization enforces the frame budget.
  serialize(frame);
  return frame;
}

Bytes serialize(const BeaconFrame& frame) {
  Bytes out;
  out.reserve(128);
  put_bytes(out, ByteView(kMagic, sizeof(kMagic)));
  put_u64(out, frame.timestamp_us);
  put_u16(out, frame.beacon_interval_tu);
  put_bytes(out, frame.ap_id);
  put_bytes(out, frame.chain_id);
  put_u32(out, frame.index);
  put_bytes(out, frame.mac);
  put_bytes(out, frame.disclosed_key);
  std::uint8_t flags = 0;
  if (frame.anchor) flags |= kFlagAnchor;
  if (frame.certificate) flags |= kFlagCert;
  out.push_back(flags);
  if (frame.anchor) {
    Bytes blob = frame.anchor->serialize();
    if (blob.size() > 0xFFFF) throw OversizeFrame("anchor blob exceeds length field");
    put_u16(out, static_cast<std::uint16_t>(blob.size()));
    put_bytes(out, blob);
  }
  if (frame.certificate) {
    Bytes blob = frame.certificate->serialize();
    if (blob.size() > 0xFFFF) throw OversizeFrame("certificate blob exceeds length field");
    put_u16(out, static_cast<std::uint16_t>(blob.size()));
    put_bytes(out, blob);
  }
  put_bytes(out, frame.vendor_tail);
  if (out.size() > kMaxFrameOctets)
    throw OversizeFrame("serialized frame is " + std::to_string(out.size()) +
                        " octets, budget is " + std::to_string(kMaxFrameOctets));
  return out;
}

BeaconFrame deserialize(ByteView data) {
  if (data.size() > kMaxFrameOctets) throw DecodeError("frame exceeds 2320-octet budget", 0);
  ByteReader reader(data);
  for (std::size_t i = 0; i < sizeof(kMagic); ++i) {
    if (reader.u8() != kMagic[i]) throw DecodeError("bad magic", i);
  }
  BeaconFrame frame;
  frame.timestamp_us = reader.u64();
  frame.beacon_interval_tu = reader.u16();
  reader.take_into(frame.ap_id);
  reader.take_into(frame.chain_id);
  frame.index = reader.u32();
  reader.take_into(frame.mac);
  reader.take_into(frame.disclosed_key);
  std::uint8_t flags = reader.u8();
  if (flags & ~(kFlagAnchor | kFlagCert))
    throw DecodeError("unknown flag bits", reader.offset() - 1);
  if (flags & kFlagAnchor) {
    std::size_t at = reader.offset();
    std::uint16_t len = reader.u16();
    Bytes blob = reader.take(len);
    try {
      frame.anchor = SignedAnchor::deserialize(blob);
    } catch (const DecodeError& e) {
      throw DecodeError("bad anchor blob: " + std::string(e.what()), at + 2 + e.offset);
    }
  }
  if (flags & kFlagCert) {
    std::size_t at = reader.offset();
    std::uint16_t len = reader.u16();
    Bytes blob = reader.take(len);
    try {
      frame.certificate = ApCertificate::deserialize(blob);
    } catch (const DecodeError& e) {
      throw DecodeError("bad certificate blob: " + std::string(e.what()), at + 2 + e.offset);
    }
  }
  frame.vendor_tail = reader.rest();
  return frame;
}

}  // namespace authtime
