#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "authtime/beacon.hpp"
#include "authtime/hash_chain.hpp"
#include "authtime/rng.hpp"
#include "authtime/trust.hpp"

namespace authtime {

// How TSF timestamp error is applied per beacon.
enum class TsfModel {
  Uniform,  // independent uniform error within +/- ppm over one interval
  Drift,    // one rate within +/- ppm drawn per run, error grows with elapsed time
};

struct ApConfig {
  ApId ap_id{};
  std::uint16_t tbtt_tu = 100;   // beacon interval in time units
  std::uint32_t tu_us = 1024;    // 802.11 TU
  double tsf_ppm = 100.0;        // TSF timer accuracy bound
  TsfModel tsf_model = TsfModel::Uniform;
  double csma_defer_prob = 0.05;       // probability a beacon is deferred
  std::uint32_t csma_defer_max_us = 2000;
  std::uint32_t anchor_every = 600;  // attach newest anchor every k beacons; 0 = never
  std::uint32_t cert_every = 0;      // attach certificate every k beacons; 0 = never
  std::uint64_t rng_seed = 1;

  std::uint64_t interval_us() const {
    return static_cast<std::uint64_t>(tbtt_tu) * tu_us;
  }
  void validate() const;  // throws InvalidParameter
};

// Nominal target transmission time of beacon n, relative to chain start.
std::uint64_t nominal_tbtt(std::uint32_t n, const ApConfig& cfg);

struct ScheduledBeacon {
  std::uint32_t n = 0;
  std::uint64_t scheduled_us = 0;  // nominal TBTT (absolute)
  std::uint64_t actual_tx_us = 0;  // after any CSMA deferral
  BeaconFrame frame;
};

// Simulated AP. All chain material and anchor/certificate signatures are
// produced at construction time; the emission loop itself performs no
// signature operations.
class ApTransmitter {
 public:
  ApTransmitter(ApConfig cfg, std::shared_ptr<const HashChain> chain, ByteView signing_key,
                ApCertificate certificate, const SignatureScheme& scheme = ed25519());

  const ApConfig& config() const { return cfg_; }
  const HashChain& chain() const { return *chain_; }
  const ApCertificate& certificate() const { return certificate_; }
  // Signed anchors at indices 0, P, 2P, ..., in index order.
  const std::vector<SignedAnchor>& anchors() const { return anchors_; }
  const SignedAnchor& initial_anchor() const { return anchors_.front(); }

  // Beacons 1..count. Throws ChainExhausted when count > N-1. Deterministic
  // given cfg.rng_seed.
  std::vector<ScheduledBeacon> emit_schedule(std::uint32_t count) const;

 private:
  ApConfig cfg_;
  std::shared_ptr<const HashChain> chain_;
  ApCertificate certificate_;
  std::vector<SignedAnchor> anchors_;
};

}  // namespace authtime
