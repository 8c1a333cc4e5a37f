#include "authtime/trust.hpp"

#include "authtime/errors.hpp"

namespace authtime {

namespace {

void put_len_prefixed(Bytes& out, ByteView data) {
  if (data.size() > 0xFFFF) throw InvalidParameter("field too long for 16-bit length prefix");
  put_u16(out, static_cast<std::uint16_t>(data.size()));
  put_bytes(out, data);
}

Bytes read_len_prefixed(ByteReader& reader) {
  std::uint16_t len = reader.u16();
  return reader.take(len);
}

}  // namespace

Bytes SignedAnchor::signed_bytes() const {
  Bytes out;
  put_bytes(out, chain_id);
  put_u32(out, index);
  put_bytes(out, value);
  put_u64(out, validity_start_us);
  put_u64(out, validity_end_us);
  return out;
}

Bytes SignedAnchor::serialize() const {
  Bytes out;
  put_bytes(out, chain_id);
  put_u32(out, index);
  put_bytes(out, value);
  put_bytes(out, signer_id);
  put_u64(out, validity_start_us);
  put_u64(out, validity_end_us);
  put_len_prefixed(out, signature);
  return out;
}

SignedAnchor SignedAnchor::deserialize(ByteView data) {
  ByteReader reader(data);
  SignedAnchor anchor;
  reader.take_into(anchor.chain_id);
  anchor.index = reader.u32();
  reader.take_into(anchor.value);
  reader.take_into(anchor.signer_id);
  anchor.validity_start_us = reader.u64();
  anchor.validity_end_us = reader.u64();
  anchor.signature = read_len_prefixed(reader);
  if (!reader.empty()) throw DecodeError("trailing bytes after anchor", reader.offset());
  return anchor;
}

Bytes ApCertificate::signed_bytes() const {
  Bytes out;
  put_bytes(out, ap_id);
  put_len_prefixed(out, public_key);
  put_len_prefixed(out, Bytes(issuer_id.begin(), issuer_id.end()));
  return out;
}

Bytes ApCertificate::serialize() const {
  Bytes out;
  put_bytes(out, ap_id);
  put_len_prefixed(out, public_key);
  put_len_prefixed(out, Bytes(issuer_id.begin(), issuer_id.end()));
  put_len_prefixed(out, issuer_signature);
  return out;
}

ApCertificate ApCertificate::deserialize(ByteView data) {
  ByteReader reader(data);
  ApCertificate cert;
  reader.take_into(cert.ap_id);
  cert.public_key = read_len_prefixed(reader);
  Bytes issuer = read_len_prefixed(reader);
  cert.issuer_id.assign(issuer.begin(), issuer.end());
  cert.issuer_signature = read_len_prefixed(reader);
  if (!reader.empty()) throw DecodeError("trailing bytes after certificate", reader.offset());
  return cert;
}

TrustStore::TrustStore(Bytes root_public_key, const SignatureScheme& scheme)
    : root_public_key_(std::move(root_public_key)), scheme_(&scheme) {}

bool TrustStore::verify_certificate(const ApCertificate& cert) const {
  if (root_public_key_.empty()) return false;
  return scheme_->verify(root_public_key_, cert.signed_bytes(), cert.issuer_signature);
}

SignedAnchor sign_anchor(const HashChain& chain, std::uint32_t index, ByteView private_key,
                         const ApId& signer_id, const SignatureScheme& scheme) {
  if (index > chain.length() || index % chain.anchor_period() != 0)
    throw IndexNotAnchorPoint("index " + std::to_string(index) + " is not an anchor point");
  SignedAnchor anchor;
  anchor.chain_id = chain.id();
  anchor.index = index;
  anchor.value = chain.element(index);
  anchor.signer_id = signer_id;
  anchor.validity_start_us = chain.validity().start_us;
  anchor.validity_end_us = chain.validity().end_us;
  anchor.signature = scheme.sign(private_key, anchor.signed_bytes());
  return anchor;
}

ElementCheck verify_element(const Digest32& candidate, std::uint32_t claimed_index,
                            const SignedAnchor& trusted) {
  return verify_element_against(candidate, claimed_index, trusted.index, trusted.value);
}

bool verify_anchor(const SignedAnchor& anchor, const ApCertificate& cert,
                   const TrustStore& store) {
  if (!store.verify_certificate(cert)) return false;
  if (cert.ap_id != anchor.signer_id) return false;
  return store.scheme().verify(cert.public_key, anchor.signed_bytes(), anchor.signature);
}

ApCertificate issue_certificate(const ApId& ap_id, ByteView ap_public_key,
                                const std::string& issuer_id, ByteView root_private_key,
                                const SignatureScheme& scheme) {
  ApCertificate cert;
  cert.ap_id = ap_id;
  cert.public_key.assign(ap_public_key.begin(), ap_public_key.end());
  cert.issuer_id = issuer_id;
  cert.issuer_signature = scheme.sign(root_private_key, cert.signed_bytes());
  return cert;
}

}  // namespace authtime
