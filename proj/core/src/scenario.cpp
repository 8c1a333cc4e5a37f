#include "authtime/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "authtime/errors.hpp"

namespace authtime {

namespace {

using nlohmann::json;

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& path, const std::string& key,
                  double fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) throw ConfigError(path + "." + key, "expected a number");
  return v->get<double>();
}

std::uint64_t get_u64(const json& obj, const std::string& path, const std::string& key,
                      std::uint64_t fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer() && !v->is_number_unsigned())
    throw ConfigError(path + "." + key, "expected an integer");
  if (v->is_number_integer() && v->get<std::int64_t>() < 0)
    throw ConfigError(path + "." + key, "expected a non-negative integer");
  return v->get<std::uint64_t>();
}

std::int64_t get_i64(const json& obj, const std::string& path, const std::string& key,
                     std::int64_t fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer() && !v->is_number_unsigned())
    throw ConfigError(path + "." + key, "expected an integer");
  return v->get<std::int64_t>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(path + "." + key, "expected a boolean");
  return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ConfigError(path + "." + key, "expected a string");
  return v->get<std::string>();
}

ClockModel parse_clock(const json& obj, const std::string& path) {
  ClockModel clock;
  clock.offset_us = get_i64(obj, path, "offset_us", 0);
  clock.drift_ppm = get_number(obj, path, "drift_ppm", 0.0);
  clock.noise_std_us = get_number(obj, path, "noise_std_us", 0.0);
  clock.rng_seed = get_u64(obj, path, "rng_seed", 0);
  return clock;
}

ApScenario parse_ap(const json& obj, const std::string& path) {
  ApScenario ap;
  std::string id = get_string(obj, path, "ap_id", "");
  if (id.empty()) throw ConfigError(path + ".ap_id", "required");
  try {
    ap.config.ap_id = ap_id_from_string(id);
  } catch (const std::exception& e) {
    throw ConfigError(path + ".ap_id", e.what());
  }
  ap.config.tbtt_tu = static_cast<std::uint16_t>(get_u64(obj, path, "tbtt_tu", 100));
  ap.config.tu_us = static_cast<std::uint32_t>(get_u64(obj, path, "tu_us", 1024));
  ap.config.tsf_ppm = get_number(obj, path, "tsf_ppm", 100.0);
  std::string model = get_string(obj, path, "tsf_model", "uniform");
  if (model == "uniform") {
    ap.config.tsf_model = TsfModel::Uniform;
  } else if (model == "drift") {
    ap.config.tsf_model = TsfModel::Drift;
  } else {
    throw ConfigError(path + ".tsf_model", "expected \"uniform\" or \"drift\"");
  }
  ap.config.csma_defer_prob = get_number(obj, path, "csma_defer_prob", 0.05);
  ap.config.csma_defer_max_us =
      static_cast<std::uint32_t>(get_u64(obj, path, "csma_defer_max_us", 2000));
  ap.config.anchor_every = static_cast<std::uint32_t>(get_u64(obj, path, "anchor_every", 600));
  ap.config.cert_every = static_cast<std::uint32_t>(get_u64(obj, path, "cert_every", 0));
  ap.config.rng_seed = get_u64(obj, path, "rng_seed", 0);
  ap.chain_length = static_cast<std::uint32_t>(get_u64(obj, path, "chain_length", 0));
  ap.anchor_period = static_cast<std::uint32_t>(get_u64(obj, path, "anchor_period", 600));
  if (const json* seed = find(obj, "chain_seed_hex")) {
    if (!seed->is_string()) throw ConfigError(path + ".chain_seed_hex", "expected hex string");
    try {
      ap.chain_seed = digest_from_hex(seed->get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(path + ".chain_seed_hex", e.what());
    }
  }
  ap.authenticated = get_bool(obj, path, "authenticated", true);
  ap.pretrust_anchor = get_bool(obj, path, "pretrust_anchor", ap.authenticated);
  return ap;
}

}  // namespace

void Scenario::validate() const {
  if (schema_version != kScenarioSchemaVersion)
    throw ConfigError("schema_version", "unsupported version " + std::to_string(schema_version));
  if (duration_s <= 0) throw ConfigError("duration_s", "must be positive");
  if (aps.empty()) throw ConfigError("aps", "at least one AP is required");
  for (std::size_t i = 0; i < aps.size(); ++i) {
    const std::string path = "aps[" + std::to_string(i) + "]";
    try {
      aps[i].config.validate();
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
    if (aps[i].anchor_period == 0) throw ConfigError(path + ".anchor_period", "must be >= 1");
    if (aps[i].chain_length > 0 && aps[i].anchor_period > aps[i].chain_length)
      throw ConfigError(path + ".anchor_period", "exceeds chain length");
  }
  if (client.speed_kmh <= 0) throw ConfigError("client.speed_kmh", "must be positive");
  if (client.ap_coverage_m <= 0) throw ConfigError("client.ap_coverage_m", "must be positive");
  try {
    timeserver.model.validate();
  } catch (const std::exception& e) {
    throw ConfigError("timeserver", e.what());
  }
  if (timeserver.poll_interval_s <= 0)
    throw ConfigError("timeserver.poll_interval_s", "must be positive");
  if (timeserver.load_multiplier < 1)
    throw ConfigError("timeserver.load_multiplier", "must be >= 1");
  if (detection.windows_s.empty()) throw ConfigError("detection.windows_s", "must be non-empty");
  double max_window = 0;
  for (double w : detection.windows_s) {
    if (w <= 0) throw ConfigError("detection.windows_s", "window lengths must be positive");
    max_window = std::max(max_window, w);
  }
  if (duration_s < max_window)
    throw ConfigError("duration_s", "must cover at least one detection window");
  if (detection.epsilon_us <= 0) throw ConfigError("detection.epsilon_us", "must be positive");
  if (cost_table.c_sig_us < 0 || cost_table.c_hmac_us < 0 || cost_table.c_hash_us < 0 ||
      cost_table.c_cert_us < 0)
    throw ConfigError("cost_table", "delays must be >= 0");
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<root>", "scenario must be a JSON object");

  Scenario scenario;
  if (!find(root, "schema_version")) throw ConfigError("schema_version", "required");
  scenario.schema_version =
      static_cast<std::uint32_t>(get_u64(root, "<root>", "schema_version", 0));
  scenario.duration_s = get_number(root, "<root>", "duration_s", 0.0);
  if (const json* seeds = find(root, "seeds")) {
    if (!seeds->is_object()) throw ConfigError("seeds", "expected an object");
    scenario.master_seed = get_u64(*seeds, "seeds", "master", 1);
  }

  const json* aps = find(root, "aps");
  if (!aps || !aps->is_array()) throw ConfigError("aps", "required array");
  for (std::size_t i = 0; i < aps->size(); ++i) {
    scenario.aps.push_back(parse_ap((*aps)[i], "aps[" + std::to_string(i) + "]"));
  }

  if (const json* client = find(root, "client")) {
    if (!client->is_object()) throw ConfigError("client", "expected an object");
    scenario.client.speed_kmh = get_number(*client, "client", "speed_kmh", 15.0);
    scenario.client.ap_coverage_m = get_number(*client, "client", "ap_coverage_m", 100.0);
    if (const json* clock = find(*client, "clock")) {
      if (!clock->is_object()) throw ConfigError("client.clock", "expected an object");
      scenario.client.clock = parse_clock(*clock, "client.clock");
    }
    scenario.client.safety_margin_us = get_u64(*client, "client", "safety_margin_us", 10'000);
    scenario.client.legacy_mode = get_bool(*client, "client", "legacy_mode", false);
  }

  if (const json* ts = find(root, "timeserver")) {
    if (!ts->is_object()) throw ConfigError("timeserver", "expected an object");
    scenario.timeserver.server_id =
        get_string(*ts, "timeserver", "server_id", "nts.sth1.ntp.se");
    scenario.timeserver.model.rtd_mean_s = get_number(*ts, "timeserver", "rtd_mean_s", 0.02765);
    scenario.timeserver.model.rtd_std_s = get_number(*ts, "timeserver", "rtd_std_s", 0.007151);
    scenario.timeserver.model.offset_mean_s =
        get_number(*ts, "timeserver", "offset_mean_s", 0.000938);
    scenario.timeserver.model.offset_std_s =
        get_number(*ts, "timeserver", "offset_std_s", 0.003309);
    scenario.timeserver.model.rng_seed = get_u64(*ts, "timeserver", "rng_seed", 0);
    scenario.timeserver.authenticated = get_bool(*ts, "timeserver", "authenticated", true);
    scenario.timeserver.poll_interval_s = get_number(*ts, "timeserver", "poll_interval_s", 30.0);
    scenario.timeserver.load_multiplier = get_number(*ts, "timeserver", "load_multiplier", 6.0);
  }

  if (const json* gnss = find(root, "gnss")) {
    if (!gnss->is_object()) throw ConfigError("gnss", "expected an object");
    scenario.gnss.ramp_start_us =
        static_cast<std::uint64_t>(get_number(*gnss, "gnss", "ramp_start_s", 0.0) * 1e6);
    scenario.gnss.ramp_rate_us_per_s = get_number(*gnss, "gnss", "ramp_rate_us_per_s", 5000.0);
    scenario.gnss.max_bias_us = get_i64(*gnss, "gnss", "max_bias_us", 120'000);
    scenario.gnss.hold_after_max = get_bool(*gnss, "gnss", "hold_after_max", true);
  }

  if (const json* attack = find(root, "attack")) {
    if (!attack->is_object()) throw ConfigError("attack", "expected an object");
    scenario.attack.kind = attack_kind_from_string(get_string(*attack, "attack", "kind", "none"));
    scenario.attack.window_start_us =
        static_cast<std::uint64_t>(get_number(*attack, "attack", "window_start_s", 0.0) * 1e6);
    double window_end_s = get_number(*attack, "attack", "window_end_s", -1.0);
    scenario.attack.window_end_us =
        window_end_s < 0 ? UINT64_MAX : static_cast<std::uint64_t>(window_end_s * 1e6);
    scenario.attack.meacon_delay_us = get_u64(*attack, "attack", "meacon_delay_us", 0);
    scenario.attack.injected_bias_us = get_i64(*attack, "attack", "injected_bias_us", 0);
    scenario.attack.rogue_ap_count =
        static_cast<std::uint32_t>(get_u64(*attack, "attack", "rogue_ap_count", 1));
    scenario.attack.rng_seed = get_u64(*attack, "attack", "rng_seed", 7);
  }

  if (const json* detection = find(root, "detection")) {
    if (!detection->is_object()) throw ConfigError("detection", "expected an object");
    if (const json* windows = find(*detection, "windows_s")) {
      if (!windows->is_array()) throw ConfigError("detection.windows_s", "expected an array");
      scenario.detection.windows_s.clear();
      for (const auto& w : *windows) {
        if (!w.is_number()) throw ConfigError("detection.windows_s", "expected numbers");
        scenario.detection.windows_s.push_back(w.get<double>());
      }
    }
    scenario.detection.epsilon_us = get_number(*detection, "detection", "epsilon_us", 25.5);
    scenario.detection.min_observations_per_window = static_cast<std::uint32_t>(
        get_u64(*detection, "detection", "min_observations_per_window", 5));
    scenario.detection.reference = reference_mode_from_string(
        get_string(*detection, "detection", "reference", "beacons_only"));
    scenario.detection.max_rule = get_bool(*detection, "detection", "max_rule", false);
  }

  if (const json* cost = find(root, "cost_table")) {
    if (!cost->is_object()) throw ConfigError("cost_table", "expected an object");
    scenario.cost_table.c_sig_us = get_number(*cost, "cost_table", "c_sig_us", 52.0);
    scenario.cost_table.c_hmac_us = get_number(*cost, "cost_table", "c_hmac_us", 7.67);
    scenario.cost_table.c_hash_us = get_number(*cost, "cost_table", "c_hash_us", 1.64);
    scenario.cost_table.c_cert_us =
        get_number(*cost, "cost_table", "c_cert_us", scenario.cost_table.c_sig_us);
  }

  scenario.validate();
  return scenario;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string scenario_to_json(const Scenario& s) {
  json root;
  root["schema_version"] = s.schema_version;
  root["duration_s"] = s.duration_s;
  root["seeds"]["master"] = s.master_seed;
  for (const auto& ap : s.aps) {
    json a;
    a["ap_id"] = ap_id_to_string(ap.config.ap_id);
    a["tbtt_tu"] = ap.config.tbtt_tu;
    a["tu_us"] = ap.config.tu_us;
    a["tsf_ppm"] = ap.config.tsf_ppm;
    a["tsf_model"] = ap.config.tsf_model == TsfModel::Drift ? "drift" : "uniform";
    a["csma_defer_prob"] = ap.config.csma_defer_prob;
    a["csma_defer_max_us"] = ap.config.csma_defer_max_us;
    a["anchor_every"] = ap.config.anchor_every;
    a["cert_every"] = ap.config.cert_every;
    a["chain_length"] = ap.chain_length;
    a["anchor_period"] = ap.anchor_period;
    a["authenticated"] = ap.authenticated;
    a["pretrust_anchor"] = ap.pretrust_anchor;
    root["aps"].push_back(a);
  }
  root["client"] = {{"speed_kmh", s.client.speed_kmh},
                    {"ap_coverage_m", s.client.ap_coverage_m},
                    {"clock",
                     {{"offset_us", s.client.clock.offset_us},
                      {"drift_ppm", s.client.clock.drift_ppm},
                      {"noise_std_us", s.client.clock.noise_std_us},
                      {"rng_seed", s.client.clock.rng_seed}}},
                    {"safety_margin_us", s.client.safety_margin_us},
                    {"legacy_mode", s.client.legacy_mode}};
  root["timeserver"] = {{"server_id", s.timeserver.server_id},
                        {"rtd_mean_s", s.timeserver.model.rtd_mean_s},
                        {"rtd_std_s", s.timeserver.model.rtd_std_s},
                        {"offset_mean_s", s.timeserver.model.offset_mean_s},
                        {"offset_std_s", s.timeserver.model.offset_std_s},
                        {"rng_seed", s.timeserver.model.rng_seed},
                        {"authenticated", s.timeserver.authenticated},
                        {"poll_interval_s", s.timeserver.poll_interval_s},
                        {"load_multiplier", s.timeserver.load_multiplier}};
  root["gnss"] = {{"ramp_start_s", static_cast<double>(s.gnss.ramp_start_us) * 1e-6},
                  {"ramp_rate_us_per_s", s.gnss.ramp_rate_us_per_s},
                  {"max_bias_us", s.gnss.max_bias_us},
                  {"hold_after_max", s.gnss.hold_after_max}};
  root["attack"] = {{"kind", to_string(s.attack.kind)},
                    {"window_start_s", static_cast<double>(s.attack.window_start_us) * 1e-6},
                    {"meacon_delay_us", s.attack.meacon_delay_us},
                    {"injected_bias_us", s.attack.injected_bias_us},
                    {"rogue_ap_count", s.attack.rogue_ap_count},
                    {"rng_seed", s.attack.rng_seed}};
  if (s.attack.window_end_us != UINT64_MAX)
    root["attack"]["window_end_s"] = static_cast<double>(s.attack.window_end_us) * 1e-6;
  root["detection"] = {{"windows_s", s.detection.windows_s},
                       {"epsilon_us", s.detection.epsilon_us},
                       {"min_observations_per_window", s.detection.min_observations_per_window},
                       {"reference", to_string(s.detection.reference)},
                       {"max_rule", s.detection.max_rule}};
  root["cost_table"] = {{"c_sig_us", s.cost_table.c_sig_us},
                        {"c_hmac_us", s.cost_table.c_hmac_us},
                        {"c_hash_us", s.cost_table.c_hash_us},
                        {"c_cert_us", s.cost_table.c_cert_us}};
  return root.dump(2);
}

}  // namespace authtime
