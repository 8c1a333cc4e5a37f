#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "authtime/capture.hpp"
#include "authtime/scenario.hpp"
#include "authtime/verifier.hpp"

namespace authtime {

struct SimEvent {
  std::uint64_t t_us = 0;
  std::string kind;    // tx, rx, gnss, exchange
  std::string detail;
};

// One received frame with simulation-side provenance.
struct FrameOutcomeRow {
  std::uint64_t rx_time_us = 0;
  std::string ap_id;
  std::uint32_t index = 0;
  bool attacker_origin = false;
  VerifyStatus status = VerifyStatus::PendingKey;
  std::uint32_t hash_walk_k = 0;
};

struct AttackerStats {
  std::uint64_t frames_injected = 0;
  std::uint64_t frames_accepted = 0;  // attacker frames that reached Authenticated
  std::uint64_t time_replies_forged = 0;
  std::uint64_t time_replies_accepted = 0;
};

struct CostReport {
  CostCounters counters;
  CostTable table;
  double modeled_cost_us = 0;  // counters x table
  NetTimeCounters net_time;
};

struct RunResult {
  std::vector<SimEvent> events;
  std::vector<FrameOutcomeRow> frames;
  // Everything the client's radio saw, replayable by the `verify` command.
  std::vector<CaptureRecord> capture;
  // Credential material of the primary AP, for standalone verification.
  SignedAnchor primary_anchor;
  ApCertificate primary_certificate;
  Bytes root_public_key;
  // Detection feeds, in client local time.
  std::vector<GnssObservation> gnss_feed;
  std::vector<BeaconTimeObservation> authenticated_feed;
  std::vector<ServerTimeObservation> server_feed;
  // One report per configured window length.
  std::map<double, DetectionReport> detection;
  // Epsilon measured from pre-ramp residuals (when >= 100 are available).
  std::optional<double> calibrated_epsilon_us;
  CostReport cost;
  AttackerStats attacker;
  std::uint64_t beacons_emitted = 0;
  std::uint64_t beacons_authenticated = 0;
};

// Deterministic end-to-end run. Throws ConfigError for invalid scenarios.
RunResult run(const Scenario& scenario);

// CSV / summary writers; file set documented in the README.
void write_outputs(const RunResult& result, const Scenario& scenario,
                   const std::string& out_dir);

}  // namespace authtime
