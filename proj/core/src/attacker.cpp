#include "authtime/attacker.hpp"

#include "authtime/errors.hpp"

namespace authtime {

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::ForgeBeacon: return "forge_beacon";
    case AttackKind::ReplaySequence: return "replay_sequence";
    case AttackKind::Meacon: return "meacon";
    case AttackKind::RogueAp: return "rogue_ap";
    case AttackKind::ForgeTimeReply: return "forge_time_reply";
  }
  return "unknown";
}

AttackKind attack_kind_from_string(const std::string& name) {
  if (name == "none") return AttackKind::None;
  if (name == "forge_beacon") return AttackKind::ForgeBeacon;
  if (name == "replay_sequence") return AttackKind::ReplaySequence;
  if (name == "meacon") return AttackKind::Meacon;
  if (name == "rogue_ap") return AttackKind::RogueAp;
  if (name == "forge_time_reply") return AttackKind::ForgeTimeReply;
  throw ConfigError("attack.kind", "unknown attack kind: " + name);
}

BeaconFrame forge_beacon(const ApId& target_ap, const ChainId& target_chain, std::uint32_t index,
                         std::uint64_t desired_timestamp_us, Rng& rng) {
  BeaconFrame frame;
  frame.timestamp_us = desired_timestamp_us;
  frame.beacon_interval_tu = 100;
  frame.ap_id = target_ap;
  frame.chain_id = target_chain;
  frame.index = index;
  frame.mac = rng.random_bytes32();
  frame.disclosed_key = rng.random_bytes32();
  return frame;
}

std::vector<TimedFrame> meacon(const std::vector<TimedFrame>& frames, std::uint64_t delay_us) {
  std::vector<TimedFrame> delayed;
  delayed.reserve(frames.size());
  for (const auto& entry : frames) {
    delayed.push_back({entry.tx_time_us + delay_us, entry.frame});
  }
  return delayed;
}

TimeExchange forge_time_reply(const TimeExchange& original, std::uint64_t bogus_t2,
                              std::uint64_t bogus_t3) {
  TimeExchange forged = original;
  forged.t2 = bogus_t2;
  forged.t3 = bogus_t3;
  return forged;
}

}  // namespace authtime
