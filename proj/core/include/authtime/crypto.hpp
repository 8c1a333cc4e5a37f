#pragma once

#include <memory>
#include <string>

#include "authtime/bytes.hpp"

namespace authtime {

Digest32 sha256(ByteView data);
Digest32 hmac_sha256(ByteView key, ByteView message);

struct KeyPair {
  Bytes public_key;
  Bytes private_key;
};

// Pluggable signature primitive. Anchors and certificates are signed through
// this interface so the scheme can be swapped without touching the protocol.
class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;

  virtual std::string name() const = 0;
  // Deterministic keypair from a 32-byte seed.
  virtual KeyPair keypair_from_seed(const Digest32& seed) const = 0;
  virtual Bytes sign(ByteView private_key, ByteView message) const = 0;
  virtual bool verify(ByteView public_key, ByteView message, ByteView signature) const = 0;
};

// Reference scheme (Ed25519, via OpenSSL).
const SignatureScheme& ed25519();

}  // namespace authtime
