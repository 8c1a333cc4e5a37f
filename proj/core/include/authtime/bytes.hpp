#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace authtime {

// 32-byte value: SHA-256 digest, chain element, symmetric key.
using Digest32 = std::array<std::uint8_t, 32>;
// Opaque 16-byte chain identifier.
using ChainId = std::array<std::uint8_t, 16>;
// BSSID-style 6-byte access-point identifier.
using ApId = std::array<std::uint8_t, 6>;

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView bytes);
Bytes from_hex(const std::string& hex);  // throws std::invalid_argument

// Fixed-width helpers; throws std::invalid_argument on size mismatch.
Digest32 digest_from_hex(const std::string& hex);
ApId ap_id_from_string(const std::string& text);  // "aa:bb:cc:dd:ee:ff" or 12 hex chars
std::string ap_id_to_string(const ApId& id);

// All multi-byte integers on the wire are big-endian.
void put_u16(Bytes& out, std::uint16_t v);
void put_u32(Bytes& out, std::uint32_t v);
void put_u64(Bytes& out, std::uint64_t v);
void put_bytes(Bytes& out, ByteView data);

// Cursor over a byte buffer; reads throw DecodeError carrying the offset
// where the buffer ran short.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool empty() const { return pos_ == data_.size(); }

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  Bytes take(std::size_t n);
  void take_into(std::span<std::uint8_t> out);
  Bytes rest();

 private:
  void need(std::size_t n) const;

  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace authtime
