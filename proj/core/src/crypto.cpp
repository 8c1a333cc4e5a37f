#include "authtime/crypto.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/params.h>

#include <cstring>
#include <stdexcept>

namespace authtime {

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
struct PkeyDeleter {
  void operator()(EVP_PKEY* key) const { EVP_PKEY_free(key); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;
using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

[[noreturn]] void fail(const char* what) { throw std::runtime_error(std::string("openssl: ") + what); }

}  // namespace

Digest32 sha256(ByteView data) {
  Digest32 out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size())
    fail("sha256");
  return out;
}

Digest32 hmac_sha256(ByteView key, ByteView message) {
  static EVP_MAC* mac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
  if (mac == nullptr) fail("hmac fetch");
  std::unique_ptr<EVP_MAC_CTX, decltype(&EVP_MAC_CTX_free)> ctx(EVP_MAC_CTX_new(mac),
                                                                EVP_MAC_CTX_free);
  if (!ctx) fail("hmac ctx");
  char digest_name[] = "SHA256";
  OSSL_PARAM params[] = {OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest_name, 0),
                         OSSL_PARAM_construct_end()};
  Digest32 out;
  std::size_t len = 0;
  if (EVP_MAC_init(ctx.get(), key.data(), key.size(), params) != 1 ||
      EVP_MAC_update(ctx.get(), message.data(), message.size()) != 1 ||
      EVP_MAC_final(ctx.get(), out.data(), &len, out.size()) != 1 || len != out.size())
    fail("hmac compute");
  return out;
}

namespace {

class Ed25519Scheme final : public SignatureScheme {
 public:
  std::string name() const override { return "ed25519"; }

  KeyPair keypair_from_seed(const Digest32& seed) const override {
    Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), seed.size()));
    if (!key) fail("ed25519 key from seed");
    KeyPair pair;
    pair.private_key.assign(seed.begin(), seed.end());
    std::size_t publen = 0;
    if (EVP_PKEY_get_raw_public_key(key.get(), nullptr, &publen) != 1) fail("ed25519 pub size");
    pair.public_key.resize(publen);
    if (EVP_PKEY_get_raw_public_key(key.get(), pair.public_key.data(), &publen) != 1)
      fail("ed25519 pub");
    return pair;
  }

  Bytes sign(ByteView private_key, ByteView message) const override {
    Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, private_key.data(),
                                          private_key.size()));
    if (!key) fail("ed25519 private key");
    MdCtx ctx(EVP_MD_CTX_new());
    if (!ctx) fail("sign ctx");
    if (EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
      fail("sign init");
    std::size_t siglen = 0;
    if (EVP_DigestSign(ctx.get(), nullptr, &siglen, message.data(), message.size()) != 1)
      fail("sign size");
    Bytes sig(siglen);
    if (EVP_DigestSign(ctx.get(), sig.data(), &siglen, message.data(), message.size()) != 1)
      fail("sign");
    sig.resize(siglen);
    return sig;
  }

  bool verify(ByteView public_key, ByteView message, ByteView signature) const override {
    Pkey key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(),
                                         public_key.size()));
    if (!key) return false;
    MdCtx ctx(EVP_MD_CTX_new());
    if (!ctx) fail("verify ctx");
    if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1)
      fail("verify init");
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                            message.size()) == 1;
  }
};

}  // namespace

const SignatureScheme& ed25519() {
  static Ed25519Scheme scheme;
  return scheme;
}

}  // namespace authtime
