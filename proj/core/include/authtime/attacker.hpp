#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "authtime/beacon.hpp"
#include "authtime/net_time.hpp"
#include "authtime/rng.hpp"

namespace authtime {

enum class AttackKind {
  None,
  ForgeBeacon,     // fabricated frames, attacker-chosen timestamps, no key access
  ReplaySequence,  // immediate re-injection of observed frames
  Meacon,          // capture and delayed re-broadcast of observed frames
  RogueAp,         // attacker-operated AP with self-issued credentials
  ForgeTimeReply,  // substituted time-server replies
};

const char* to_string(AttackKind kind);
AttackKind attack_kind_from_string(const std::string& name);  // throws ConfigError

struct AttackScenario {
  AttackKind kind = AttackKind::None;
  std::uint64_t window_start_us = 0;
  std::uint64_t window_end_us = UINT64_MAX;
  std::uint64_t meacon_delay_us = 0;
  // Bias the attacker writes into forged beacon timestamps / server replies.
  std::int64_t injected_bias_us = 0;
  std::uint32_t rogue_ap_count = 1;
  std::uint64_t rng_seed = 7;
};

// A frame paired with its (re)broadcast time.
struct TimedFrame {
  std::uint64_t tx_time_us = 0;
  BeaconFrame frame;
};

// Syntactically valid beacon for `target` with attacker-chosen timestamp.
// MAC and keys are random: the attacker holds no chain material.
BeaconFrame forge_beacon(const ApId& target_ap, const ChainId& target_chain, std::uint32_t index,
                         std::uint64_t desired_timestamp_us, Rng& rng);

// Identical frames re-broadcast delay_us later.
std::vector<TimedFrame> meacon(const std::vector<TimedFrame>& frames, std::uint64_t delay_us);

// Substituted server timestamps; whatever tag the original carried no longer
// matches (and a no-op forge leaves it intact).
TimeExchange forge_time_reply(const TimeExchange& original, std::uint64_t bogus_t2,
                              std::uint64_t bogus_t3);

}  // namespace authtime
