#include "authtime/verifier.hpp"

#include <algorithm>

#include "authtime/crypto.hpp"
#include "authtime/errors.hpp"

namespace authtime {

namespace {
constexpr std::uint64_t kTuUs = 1024;
}

const char* to_string(VerifyStatus status) {
  switch (status) {
    case VerifyStatus::Authenticated: return "authenticated";
    case VerifyStatus::PendingKey: return "pending_key";
    case VerifyStatus::RejectedMAC: return "rejected_mac";
    case VerifyStatus::RejectedChain: return "rejected_chain";
    case VerifyStatus::RejectedSecurityCondition: return "rejected_security_condition";
    case VerifyStatus::RejectedReplay: return "rejected_replay";
    case VerifyStatus::RejectedSignature: return "rejected_signature";
  }
  return "unknown";
}

Verifier::Verifier(VerifierConfig cfg, TrustStore store, const SignatureScheme& scheme)
    : cfg_(cfg), store_(std::move(store)), scheme_(&scheme) {}

void Verifier::pin_certificate(const ApCertificate& cert) {
  for (auto& [key, state] : states_) {
    if (key.ap_id == cert.ap_id && !state.cert) state.cert = cert;
  }
  pinned_certs_[cert.ap_id] = cert;
}

bool Verifier::install_anchor(const SignedAnchor& anchor, const ApCertificate& cert) {
  if (store_.has_root()) {
    ++counters_.cert_verifies;
    if (!store_.verify_certificate(cert)) return false;
  }
  if (cert.ap_id != anchor.signer_id) return false;
  ++counters_.sig_verifies;
  if (!scheme_->verify(cert.public_key, anchor.signed_bytes(), anchor.signature)) return false;

  ChainState& state = states_[ChainKey{anchor.signer_id, anchor.chain_id}];
  state.cert = cert;
  if (!state.best_anchor || anchor.index > state.best_anchor->index) {
    state.best_anchor = anchor;
    if (anchor.index >= state.latest_verified_index) {
      state.latest_verified_index = anchor.index;
      state.latest_verified_value = anchor.value;
    }
  }
  return true;
}

void Verifier::finalize(std::size_t log_slot, VerifyStatus status) {
  frame_log_[log_slot].status = status;
}

void Verifier::resolve_pending(ChainState& state, const std::vector<Digest32>& walked,
                               std::uint32_t top_index) {
  const std::uint32_t bottom_index = top_index - static_cast<std::uint32_t>(walked.size() - 1);
  std::deque<Pending> pending;
  pending.swap(state.pending);
  for (auto& entry : pending) {
    const std::uint32_t key_index = entry.frame.index + 1;
    if (key_index > top_index) {
      state.pending.push_back(std::move(entry));  // key not disclosed yet
      continue;
    }
    if (key_index < bottom_index) {
      // Key material fell behind the verified frontier; no safe way left to
      // authenticate this frame.
      finalize(entry.log_slot, VerifyStatus::RejectedSecurityCondition);
      continue;
    }
    const Digest32& key = walked[top_index - key_index];
    ++counters_.hmacs;
    const Digest32 expected = hmac_sha256(key, mac_message_bytes(entry.frame));
    if (expected != entry.frame.mac) {
      finalize(entry.log_slot, VerifyStatus::RejectedMAC);
      continue;
    }
    const std::uint32_t m = entry.frame.index;
    if (static_cast<std::int64_t>(m) <= state.highest_authenticated_index) {
      finalize(entry.log_slot, VerifyStatus::RejectedReplay);
      continue;
    }
    state.highest_authenticated_index = m;
    observations_.push_back({m, entry.frame.timestamp_us, entry.rx_time_us});
    finalize(entry.log_slot, VerifyStatus::Authenticated);
  }
}

bool Verifier::absorb_attachments(ChainState& state, const BeaconFrame& frame,
                                  std::uint64_t local_estimate_us) {
  if (frame.certificate) {
    bool known = state.cert && *state.cert == *frame.certificate;
    if (!known) {
      ++counters_.cert_verifies;
      if (store_.verify_certificate(*frame.certificate) &&
          frame.certificate->ap_id == frame.ap_id) {
        state.cert = *frame.certificate;
      }
    }
  }
  if (!state.cert) {
    auto pinned = pinned_certs_.find(frame.ap_id);
    if (pinned != pinned_certs_.end()) state.cert = pinned->second;
  }

  if (!frame.anchor) return true;
  const SignedAnchor& anchor = *frame.anchor;

  if (anchor.chain_id != frame.chain_id || anchor.signer_id != frame.ap_id) return false;
  // Re-broadcast of an anchor already trusted: no signature work.
  if (state.best_anchor && anchor.index == state.best_anchor->index &&
      anchor == *state.best_anchor)
    return true;
  // Anchors below the current trust point are ignored, not an error.
  if (state.best_anchor && anchor.index < state.best_anchor->index) return true;

  if (local_estimate_us < anchor.validity_start_us || local_estimate_us > anchor.validity_end_us)
    return false;
  if (!state.cert) return false;

  ++counters_.sig_verifies;
  if (!scheme_->verify(state.cert->public_key, anchor.signed_bytes(), anchor.signature))
    return false;

  if (!state.best_anchor) {
    state.best_anchor = anchor;
    state.latest_verified_index = anchor.index;
    state.latest_verified_value = anchor.value;
    return true;
  }

  if (anchor.index > state.latest_verified_index) {
    // Bridge the gap so keys for still-buffered frames stay recoverable, and
    // confirm the anchor is consistent with the already-verified chain.
    const std::uint32_t k = anchor.index - state.latest_verified_index;
    std::vector<Digest32> walked;  // walked[j] = h_{anchor.index - j}
    walked.reserve(k + 1);
    walked.push_back(anchor.value);
    for (std::uint32_t j = 0; j < k; ++j) walked.push_back(sha256(walked.back()));
    counters_.hashes += k;
    if (walked.back() != state.latest_verified_value) return false;
    resolve_pending(state, walked, anchor.index);
    state.latest_verified_index = anchor.index;
    state.latest_verified_value = anchor.value;
  }
  state.best_anchor = anchor;
  return true;
}

VerifyOutcome Verifier::on_receive(const BeaconFrame& frame, std::uint64_t rx_time_us,
                                   std::uint64_t local_time_estimate_us) {
  const std::size_t log_slot = frame_log_.size();
  frame_log_.push_back({frame.index, rx_time_us, VerifyStatus::PendingKey, 0});

  if (cfg_.legacy_mode) {
    // No-authentication baseline: every well-formed frame is taken at face value.
    observations_.push_back({frame.index, frame.timestamp_us, rx_time_us});
    finalize(log_slot, VerifyStatus::Authenticated);
    return {VerifyStatus::Authenticated, 0, "legacy"};
  }

  ChainState& state = states_[ChainKey{frame.ap_id, frame.chain_id}];

  if (!absorb_attachments(state, frame, local_time_estimate_us)) {
    finalize(log_slot, VerifyStatus::RejectedSignature);
    return {VerifyStatus::RejectedSignature, 0, "attached anchor/certificate failed verification"};
  }

  if (frame.index == 0) {
    finalize(log_slot, VerifyStatus::RejectedChain);
    return {VerifyStatus::RejectedChain, 0, "index 0 is the anchor, never a beacon"};
  }

  if (!state.best_anchor) {
    // No trust point yet: hold the frame until an anchor shows up.
    state.pre_anchor.push_back({frame, rx_time_us, local_time_estimate_us, log_slot});
    if (state.pre_anchor.size() > cfg_.pre_anchor_cap) {
      finalize(state.pre_anchor.front().log_slot, VerifyStatus::RejectedSecurityCondition);
      state.pre_anchor.pop_front();
    }
    return {VerifyStatus::PendingKey, 0, "awaiting first anchor"};
  }

  // A newly trusted anchor unblocks frames received before it.
  if (!state.pre_anchor.empty()) {
    std::deque<Pending> held;
    held.swap(state.pre_anchor);
    for (auto& entry : held) {
      if (entry.frame.index < state.best_anchor->index) {
        // Key material predates the trust point; cannot be verified safely.
        finalize(entry.log_slot, VerifyStatus::RejectedSecurityCondition);
        continue;
      }
      VerifyOutcome outcome = process_anchored(state, entry.frame, entry.rx_time_us,
                                               entry.local_estimate_us, entry.log_slot);
      frame_log_[entry.log_slot].hash_walk_k = outcome.hash_walk_k;
    }
  }

  VerifyOutcome outcome =
      process_anchored(state, frame, rx_time_us, local_time_estimate_us, log_slot);
  frame_log_[log_slot].hash_walk_k = outcome.hash_walk_k;
  return outcome;
}

VerifyOutcome Verifier::process_anchored(ChainState& state, const BeaconFrame& frame,
                                         std::uint64_t rx_time_us,
                                         std::uint64_t local_estimate_us, std::size_t log_slot) {
  const SignedAnchor& anchor = *state.best_anchor;
  const std::uint32_t n = frame.index;

  // Replay and stale-index rejection.
  if (n < anchor.index) {
    finalize(log_slot, VerifyStatus::RejectedReplay);
    return {VerifyStatus::RejectedReplay, 0, "index below trusted anchor"};
  }
  if (static_cast<std::int64_t>(n) <= state.highest_authenticated_index) {
    finalize(log_slot, VerifyStatus::RejectedReplay);
    return {VerifyStatus::RejectedReplay, 0, "index already authenticated"};
  }
  if (n <= state.latest_verified_index &&
      !(n == anchor.index && state.latest_verified_index == anchor.index)) {
    finalize(log_slot, VerifyStatus::RejectedReplay);
    return {VerifyStatus::RejectedReplay, 0, "key for this index already disclosed"};
  }
  for (const auto& pending : state.pending) {
    if (pending.frame.index == n) {
      finalize(log_slot, VerifyStatus::RejectedReplay);
      return {VerifyStatus::RejectedReplay, 0, "duplicate of a buffered frame"};
    }
  }

  // Chain epoch must still be open.
  if (local_estimate_us > anchor.validity_end_us) {
    finalize(log_slot, VerifyStatus::RejectedChain);
    return {VerifyStatus::RejectedChain, 0, "chain validity window expired"};
  }

  // TESLA security condition: the frame must arrive well before its MAC key
  // (h_{n+1}) is due for disclosure at the (n+1)-th TBTT.
  const std::uint64_t interval_us = static_cast<std::uint64_t>(frame.beacon_interval_tu) * kTuUs;
  const std::uint64_t disclosure_us =
      anchor.validity_start_us + static_cast<std::uint64_t>(n + 1) * interval_us;
  if (local_estimate_us + cfg_.safety_margin_us > disclosure_us) {
    finalize(log_slot, VerifyStatus::RejectedSecurityCondition);
    return {VerifyStatus::RejectedSecurityCondition, 0,
            "received too close to key disclosure time"};
  }

  // Walk the disclosed key back to the newest verified element. The case
  // n == latest (fresh anchor value re-disclosed) is a zero-length walk.
  const std::uint32_t k = n - std::min(n, state.latest_verified_index);
  std::vector<Digest32> walked;  // walked[j] = h_{n-j}
  walked.reserve(k + 1);
  walked.push_back(frame.disclosed_key);
  for (std::uint32_t j = 0; j < k; ++j) walked.push_back(sha256(walked.back()));
  counters_.hashes += k;
  if (walked.back() != state.latest_verified_value) {
    finalize(log_slot, VerifyStatus::RejectedChain);
    return {VerifyStatus::RejectedChain, k, "disclosed key does not reach trusted element"};
  }
  state.latest_verified_index = n;
  state.latest_verified_value = frame.disclosed_key;

  // The verified walk exposes h_{m+1} for every buffered frame m < n.
  resolve_pending(state, walked, n);

  state.pending.push_back({frame, rx_time_us, local_estimate_us, log_slot});
  if (state.pending.size() > cfg_.pending_cap) {
    finalize(state.pending.front().log_slot, VerifyStatus::RejectedSecurityCondition);
    state.pending.pop_front();
  }
  return {VerifyStatus::PendingKey, k, "buffered until key disclosure"};
}

}  // namespace authtime
