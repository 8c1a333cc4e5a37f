#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "authtime/bytes.hpp"

namespace authtime {

// One received frame in a capture file.
// Record layout: rx_time_us (8, big-endian) | frame_len (2) | frame bytes.
struct CaptureRecord {
  std::uint64_t rx_time_us = 0;
  Bytes frame_bytes;

  bool operator==(const CaptureRecord&) const = default;
};

void write_capture(std::ostream& out, const std::vector<CaptureRecord>& records);
std::vector<CaptureRecord> read_capture(std::istream& in);  // throws DecodeError

void write_capture_file(const std::string& path, const std::vector<CaptureRecord>& records);
std::vector<CaptureRecord> read_capture_file(const std::string& path);

}  // namespace authtime
