#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace authtime {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParameter : Error {
  using Error::Error;
};

// Malformed binary input. `offset` is the byte position that failed.
struct DecodeError : Error {
  DecodeError(const std::string& what, std::size_t offset_)
      : Error(what + " (offset " + std::to_string(offset_) + ")"), offset(offset_) {}
  std::size_t offset;
};

struct IndexOrder : Error {
  using Error::Error;
};

struct IndexNotAnchorPoint : Error {
  using Error::Error;
};

struct IndexOutOfChain : Error {
  using Error::Error;
};

struct OversizeFrame : Error {
  using Error::Error;
};

struct ChainExhausted : Error {
  using Error::Error;
};

struct UnknownServer : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

// Bad scenario/config input. `field_path` names the offending field.
struct ConfigError : Error {
  ConfigError(const std::string& field_path_, const std::string& what)
      : Error(field_path_ + ": " + what), field_path(field_path_) {}
  std::string field_path;
};

}  // namespace authtime
