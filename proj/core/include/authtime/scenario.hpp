#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "authtime/attacker.hpp"
#include "authtime/clock_model.hpp"
#include "authtime/cost.hpp"
#include "authtime/detector.hpp"
#include "authtime/net_time.hpp"
#include "authtime/transmitter.hpp"

namespace authtime {

inline constexpr std::uint32_t kScenarioSchemaVersion = 1;

struct ApScenario {
  ApConfig config;
  std::uint32_t chain_length = 0;    // 0: sized automatically from the duration
  std::uint32_t anchor_period = 600;
  std::optional<Digest32> chain_seed;  // derived from the master seed if absent
  bool authenticated = true;           // unauthenticated APs never expose anchors
  bool pretrust_anchor = true;         // preinstall initial anchor + certificate
};

struct ClientScenario {
  double speed_kmh = 15.0;
  double ap_coverage_m = 100.0;
  ClockModel clock;
  std::uint64_t safety_margin_us = 10'000;
  bool legacy_mode = false;
};

struct TimeServerScenario {
  std::string server_id = "nts.sth1.ntp.se";
  DelayModel model;
  bool authenticated = true;
  double poll_interval_s = 30.0;
  double load_multiplier = 6.0;
};

struct DetectionScenario {
  std::vector<double> windows_s{1.0, 3.0, 5.0};
  double epsilon_us = 25.5;
  std::uint32_t min_observations_per_window = 5;
  ReferenceMode reference = ReferenceMode::BeaconsOnly;
  bool max_rule = false;
};

struct Scenario {
  std::uint32_t schema_version = kScenarioSchemaVersion;
  double duration_s = 0;
  std::uint64_t master_seed = 1;
  std::vector<ApScenario> aps;
  ClientScenario client;
  TimeServerScenario timeserver;
  GnssAttackProfile gnss;
  AttackScenario attack;
  DetectionScenario detection;
  CostTable cost_table;

  void validate() const;  // throws ConfigError with a field path
};

// Parses the JSON scenario text; throws ConfigError naming the bad field.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);
// Round-trip back to JSON (used for the run summary's config echo).
std::string scenario_to_json(const Scenario& scenario);

}  // namespace authtime
