#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "authtime/beacon.hpp"
#include "authtime/cost.hpp"
#include "authtime/trust.hpp"

namespace authtime {

enum class VerifyStatus {
  Authenticated,
  PendingKey,
  RejectedMAC,
  RejectedChain,
  RejectedSecurityCondition,
  RejectedReplay,
  RejectedSignature,
};

const char* to_string(VerifyStatus status);

struct VerifyOutcome {
  VerifyStatus status = VerifyStatus::PendingKey;
  std::uint32_t hash_walk_k = 0;  // 0 unless a chain walk occurred
  std::string detail;
};

// Primitive invocation counts; multiplied by a CostTable they give the
// receiver-side authentication cost of a run.
struct CostCounters {
  std::uint64_t sig_verifies = 0;   // anchor signature checks
  std::uint64_t cert_verifies = 0;  // certificate chain checks
  std::uint64_t hmacs = 0;
  std::uint64_t hashes = 0;

  double total_cost_us(const CostTable& table) const {
    return static_cast<double>(sig_verifies) * table.c_sig_us +
           static_cast<double>(cert_verifies) * table.c_cert_us +
           static_cast<double>(hmacs) * table.c_hmac_us +
           static_cast<double>(hashes) * table.c_hash_us;
  }
};

// A beacon that survived MAC, chain-membership, and security-condition checks.
struct AuthenticatedObservation {
  std::uint32_t index = 0;
  std::uint64_t beacon_timestamp_us = 0;
  std::uint64_t rx_time_us = 0;
};

struct VerifierConfig {
  // A beacon is buffered only if it is received at least this long before its
  // MAC key's scheduled disclosure.
  std::uint64_t safety_margin_us = 10'000;
  // Bound on buffered frames per (AP, chain); oldest evicted first.
  std::size_t pending_cap = 8;
  // Bound on frames held while waiting for a first anchor.
  std::size_t pre_anchor_cap = 16;
  // Baseline client without authentication: accepts every well-formed frame.
  bool legacy_mode = false;
};

// Mobile-client verification pipeline. One instance per client; mutate from a
// single simulation loop only.
class Verifier {
 public:
  // Per received frame: its final status once known (a buffered frame flips
  // from PendingKey to Authenticated/RejectedMAC when its key arrives).
  struct FrameRecord {
    std::uint32_t index = 0;
    std::uint64_t rx_time_us = 0;
    VerifyStatus status = VerifyStatus::PendingKey;
    std::uint32_t hash_walk_k = 0;
  };

  Verifier(VerifierConfig cfg, TrustStore store, const SignatureScheme& scheme = ed25519());

  // Out-of-band provisioning (e.g. preinstalled credentials). Counts the
  // signature work. Returns false if the anchor fails verification.
  bool install_anchor(const SignedAnchor& anchor, const ApCertificate& cert);
  // Pin a certificate as trusted without a root check (preinstalled cert).
  void pin_certificate(const ApCertificate& cert);

  // Feed one decoded frame. `local_time_estimate_us` is the client's best
  // estimate of the current true time (local clock corrected by the network
  // time offset) at the reception instant.
  VerifyOutcome on_receive(const BeaconFrame& frame, std::uint64_t rx_time_us,
                           std::uint64_t local_time_estimate_us);

  const std::vector<AuthenticatedObservation>& authenticated_observations() const {
    return observations_;
  }
  const CostCounters& counters() const { return counters_; }
  const std::vector<FrameRecord>& frame_log() const { return frame_log_; }

 private:
  struct ChainKey {
    ApId ap_id;
    ChainId chain_id;
    auto operator<=>(const ChainKey&) const = default;
  };

  struct Pending {
    BeaconFrame frame;
    std::uint64_t rx_time_us = 0;
    std::uint64_t local_estimate_us = 0;
    std::size_t log_slot = 0;
  };

  struct ChainState {
    std::optional<SignedAnchor> best_anchor;
    std::optional<ApCertificate> cert;
    // Highest chain element verified so far (anchor or disclosed key).
    std::uint32_t latest_verified_index = 0;
    Digest32 latest_verified_value{};
    std::int64_t highest_authenticated_index = -1;
    std::deque<Pending> pending;
    std::deque<Pending> pre_anchor;  // frames waiting for a first anchor
  };

  VerifyOutcome process_anchored(ChainState& state, const BeaconFrame& frame,
                                 std::uint64_t rx_time_us, std::uint64_t local_estimate_us,
                                 std::size_t log_slot);
  // Handles an attached anchor/certificate; returns false if an attached
  // anchor was present but failed verification.
  bool absorb_attachments(ChainState& state, const BeaconFrame& frame,
                          std::uint64_t local_estimate_us);
  // `walked[j]` holds h_{top_index - j}; MAC-checks every buffered frame whose
  // key lies inside that range.
  void resolve_pending(ChainState& state, const std::vector<Digest32>& walked,
                       std::uint32_t top_index);
  void finalize(std::size_t log_slot, VerifyStatus status);

  VerifierConfig cfg_;
  TrustStore store_;
  const SignatureScheme* scheme_;
  std::map<ChainKey, ChainState> states_;
  std::map<ApId, ApCertificate> pinned_certs_;
  std::vector<AuthenticatedObservation> observations_;
  std::vector<FrameRecord> frame_log_;
  CostCounters counters_;
};

}  // namespace authtime
