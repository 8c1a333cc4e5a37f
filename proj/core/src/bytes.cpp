#include "authtime/bytes.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "authtime/errors.hpp"

namespace authtime {

namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteView bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xF]);
  }
  return out;
}

Bytes from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_nibble(hex[2 * i]);
    int lo = hex_nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

Digest32 digest_from_hex(const std::string& hex) {
  Bytes raw = from_hex(hex);
  if (raw.size() != 32) throw std::invalid_argument("expected 32 bytes of hex");
  Digest32 out;
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

ApId ap_id_from_string(const std::string& text) {
  std::string hex;
  hex.reserve(12);
  for (char c : text) {
    if (c == ':' || c == '-') continue;
    hex.push_back(c);
  }
  Bytes raw = from_hex(hex);
  if (raw.size() != 6) throw std::invalid_argument("AP id must be 6 bytes");
  ApId out;
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

std::string ap_id_to_string(const ApId& id) {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x", id[0], id[1], id[2], id[3],
                id[4], id[5]);
  return buf;
}

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_bytes(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

void ByteReader::need(std::size_t n) const {
  if (data_.size() - pos_ < n) throw DecodeError("truncated input", pos_);
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
  need(2);
  std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_ + i];
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = v << 8 | data_[pos_ + i];
  pos_ += 8;
  return v;
}

Bytes ByteReader::take(std::size_t n) {
  need(n);
  Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
  pos_ += n;
  return out;
}

void ByteReader::take_into(std::span<std::uint8_t> out) {
  need(out.size());
  std::copy(data_.begin() + pos_, data_.begin() + pos_ + out.size(), out.begin());
  pos_ += out.size();
}

Bytes ByteReader::rest() {
  Bytes out(data_.begin() + pos_, data_.end());
  pos_ = data_.size();
  return out;
}

}  // namespace authtime
