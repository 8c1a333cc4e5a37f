#include "authtime/capture.hpp"

#include <fstream>
#include <sstream>

#include "authtime/errors.hpp"

namespace authtime {

void write_capture(std::ostream& out, const std::vector<CaptureRecord>& records) {
  for (const auto& record : records) {
    if (record.frame_bytes.size() > 0xFFFF)
      throw InvalidParameter("capture frame exceeds 16-bit length field");
    Bytes header;
    put_u64(header, record.rx_time_us);
    put_u16(header, static_cast<std::uint16_t>(record.frame_bytes.size()));
    out.write(reinterpret_cast<const char*>(header.data()), header.size());
    out.write(reinterpret_cast<const char*>(record.frame_bytes.data()),
              record.frame_bytes.size());
  }
}

std::vector<CaptureRecord> read_capture(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string& raw = buffer.str();
  ByteView data(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size());

  std::vector<CaptureRecord> records;
  ByteReader reader(data);
  while (!reader.empty()) {
    CaptureRecord record;
    record.rx_time_us = reader.u64();
    std::uint16_t len = reader.u16();
    record.frame_bytes = reader.take(len);
    records.push_back(std::move(record));
  }
  return records;
}

void write_capture_file(const std::string& path, const std::vector<CaptureRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open capture file for writing: " + path);
  write_capture(out, records);
}

std::vector<CaptureRecord> read_capture_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open capture file: " + path);
  return read_capture(in);
}

}  // namespace authtime
