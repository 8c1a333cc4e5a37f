#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "authtime/bytes.hpp"
#include "authtime/crypto.hpp"
#include "authtime/hash_chain.hpp"

namespace authtime {

// Chain element digitally signed by the AP. Index 0 is the initial anchor;
// intermediate anchors sit at multiples of the chain's anchor period. The
// signature also binds the chain validity window, so an anchor cannot be
// replayed into a later chain epoch.
struct SignedAnchor {
  ChainId chain_id{};
  std::uint32_t index = 0;
  Digest32 value{};
  ApId signer_id{};
  std::uint64_t validity_start_us = 0;
  std::uint64_t validity_end_us = 0;
  Bytes signature;

  // Canonical byte string covered by the signature.
  Bytes signed_bytes() const;
  Bytes serialize() const;
  static SignedAnchor deserialize(ByteView data);  // throws DecodeError

  bool operator==(const SignedAnchor&) const = default;
};

// Binds an AP identity to its public key, signed by the trust root.
struct ApCertificate {
  ApId ap_id{};
  Bytes public_key;
  std::string issuer_id;
  Bytes issuer_signature;

  Bytes signed_bytes() const;
  Bytes serialize() const;
  static ApCertificate deserialize(ByteView data);  // throws DecodeError

  bool operator==(const ApCertificate&) const = default;
};

// Static root of trust: one root public key for certificates plus the set of
// time-server identities the client will talk to.
class TrustStore {
 public:
  TrustStore() = default;
  explicit TrustStore(Bytes root_public_key, const SignatureScheme& scheme = ed25519());

  bool has_root() const { return !root_public_key_.empty(); }
  const Bytes& root_public_key() const { return root_public_key_; }
  const SignatureScheme& scheme() const { return *scheme_; }

  bool verify_certificate(const ApCertificate& cert) const;

  void add_time_server(const std::string& server_id) { servers_.insert(server_id); }
  bool knows_time_server(const std::string& server_id) const { return servers_.contains(server_id); }

 private:
  Bytes root_public_key_;
  const SignatureScheme* scheme_ = &ed25519();
  std::set<std::string> servers_;
};

// Signs h_index of `chain`. Throws IndexNotAnchorPoint unless index is 0 or a
// multiple of the chain's anchor period within [0, N].
SignedAnchor sign_anchor(const HashChain& chain, std::uint32_t index, ByteView private_key,
                         const ApId& signer_id, const SignatureScheme& scheme = ed25519());

// Walks `candidate` back to a signature-verified anchor. The anchor must have
// been verified beforehand; throws IndexOrder when claimed_index is below it.
ElementCheck verify_element(const Digest32& candidate, std::uint32_t claimed_index,
                            const SignedAnchor& trusted);

// True iff `cert` chains to the trust-store root and `anchor` verifies under
// the certificate's key with a matching signer identity.
bool verify_anchor(const SignedAnchor& anchor, const ApCertificate& cert,
                   const TrustStore& store);

// Root-of-trust helper: certificate for an AP key, signed with the root key.
ApCertificate issue_certificate(const ApId& ap_id, ByteView ap_public_key,
                                const std::string& issuer_id, ByteView root_private_key,
                                const SignatureScheme& scheme = ed25519());

}  // namespace authtime
