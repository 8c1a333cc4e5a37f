#include "authtime/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "authtime/errors.hpp"
#include "authtime/rng.hpp"

namespace authtime {

namespace {

// Seed-derivation streams off the master seed.
enum SeedStream : std::uint64_t {
  kSeedRootKey = 0,
  kSeedClientClock = 1,
  kSeedTimeServer = 2,
  kSeedAttacker = 3,
  kSeedApChainBase = 100,
  kSeedApKeyBase = 200,
  kSeedApRngBase = 300,
  kSeedRogueBase = 400,
};

std::string format_us(std::uint64_t us) { return std::to_string(us); }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct RxEvent {
  std::uint64_t t_us = 0;
  // Ordering class at equal times: GNSS fixes, then server polls, then frames.
  enum Type { Gnss = 0, Poll = 1, Beacon = 2 } type = Beacon;
  std::uint64_t seq = 0;
  std::size_t ap_index = 0;  // into the combined honest+rogue transmitter list
  bool attacker = false;
  BeaconFrame frame;
  std::uint32_t gnss_epoch = 0;
};

struct BuiltAp {
  std::unique_ptr<ApTransmitter> transmitter;
  std::shared_ptr<const HashChain> chain;
  bool authenticated = false;
  bool pretrust = false;
  bool rogue = false;
};

}  // namespace

RunResult run(const Scenario& scenario) {
  scenario.validate();
  RunResult result;

  const std::uint64_t duration_us = static_cast<std::uint64_t>(scenario.duration_s * 1e6);
  Rng master(scenario.master_seed);

  // Root of trust.
  Rng root_rng(master.child_seed(kSeedRootKey));
  const KeyPair root_keys = ed25519().keypair_from_seed(root_rng.random_bytes32());
  TrustStore store(root_keys.public_key);
  store.add_time_server(scenario.timeserver.server_id);

  // Honest APs.
  std::vector<BuiltAp> aps;
  for (std::size_t i = 0; i < scenario.aps.size(); ++i) {
    const ApScenario& spec = scenario.aps[i];
    ApConfig cfg = spec.config;
    if (cfg.rng_seed == 0) cfg.rng_seed = master.child_seed(kSeedApRngBase + i);
    if (!spec.authenticated) {
      cfg.anchor_every = 0;
      cfg.cert_every = 0;
    }
    const std::uint64_t interval = cfg.interval_us();
    const std::uint32_t beacon_count =
        duration_us > 0 ? static_cast<std::uint32_t>((duration_us - 1) / interval) : 0;
    std::uint32_t chain_length = spec.chain_length;
    if (chain_length == 0) chain_length = beacon_count + 2;
    if (chain_length < beacon_count + 1)
      throw ConfigError("aps[" + std::to_string(i) + "].chain_length",
                        "chain too short for the configured duration");
    if (spec.anchor_period > chain_length)
      throw ConfigError("aps[" + std::to_string(i) + "].anchor_period", "exceeds chain length");

    Digest32 chain_seed;
    if (spec.chain_seed) {
      chain_seed = *spec.chain_seed;
    } else {
      Rng seed_rng(master.child_seed(kSeedApChainBase + i));
      chain_seed = seed_rng.random_bytes32();
    }
    ChainValidity validity{0, static_cast<std::uint64_t>(chain_length) * interval + interval};
    auto chain = std::make_shared<const HashChain>(
        HashChain::generate(chain_seed, chain_length, spec.anchor_period, validity));

    Rng key_rng(master.child_seed(kSeedApKeyBase + i));
    const KeyPair ap_keys = ed25519().keypair_from_seed(key_rng.random_bytes32());
    ApCertificate cert =
        issue_certificate(cfg.ap_id, ap_keys.public_key, "root", root_keys.private_key);

    BuiltAp built;
    built.transmitter =
        std::make_unique<ApTransmitter>(cfg, chain, ap_keys.private_key, std::move(cert));
    built.chain = chain;
    built.authenticated = spec.authenticated;
    built.pretrust = spec.pretrust_anchor && spec.authenticated;
    aps.push_back(std::move(built));
  }

  // Rogue APs run their own chains under a self-made root that is not in the
  // client's trust store.
  Rng attacker_rng(master.child_seed(kSeedAttacker) ^ scenario.attack.rng_seed);
  if (scenario.attack.kind == AttackKind::RogueAp) {
    Rng rogue_root_rng(master.child_seed(kSeedRogueBase));
    const KeyPair rogue_root = ed25519().keypair_from_seed(rogue_root_rng.random_bytes32());
    for (std::uint32_t r = 0; r < scenario.attack.rogue_ap_count; ++r) {
      ApConfig cfg = scenario.aps.front().config;
      cfg.ap_id = ApId{0xaa, 0xaa, 0xaa, 0xaa, 0xaa, static_cast<std::uint8_t>(r)};
      cfg.rng_seed = master.child_seed(kSeedRogueBase + 1 + r);
      cfg.anchor_every = scenario.aps.front().anchor_period;
      cfg.cert_every = scenario.aps.front().anchor_period;
      const std::uint64_t interval = cfg.interval_us();
      const std::uint32_t beacon_count =
          duration_us > 0 ? static_cast<std::uint32_t>((duration_us - 1) / interval) : 0;
      const std::uint32_t chain_length = beacon_count + 2;
      Rng seed_rng(master.child_seed(kSeedRogueBase + 100 + r));
      ChainValidity validity{0, static_cast<std::uint64_t>(chain_length) * interval + interval};
      auto chain = std::make_shared<const HashChain>(HashChain::generate(
          seed_rng.random_bytes32(), chain_length, scenario.aps.front().anchor_period, validity));
      Rng key_rng(master.child_seed(kSeedRogueBase + 200 + r));
      const KeyPair keys = ed25519().keypair_from_seed(key_rng.random_bytes32());
      ApCertificate cert =
          issue_certificate(cfg.ap_id, keys.public_key, "rogue", rogue_root.private_key);
      BuiltAp built;
      built.transmitter =
          std::make_unique<ApTransmitter>(cfg, chain, keys.private_key, std::move(cert));
      built.chain = chain;
      built.rogue = true;
      aps.push_back(std::move(built));
    }
  }

  // Client.
  VerifierConfig vcfg;
  vcfg.safety_margin_us = scenario.client.safety_margin_us;
  vcfg.legacy_mode = scenario.client.legacy_mode;
  Verifier verifier(vcfg, store);
  for (const auto& ap : aps) {
    if (ap.pretrust) {
      verifier.install_anchor(ap.transmitter->initial_anchor(), ap.transmitter->certificate());
    }
  }
  ClockModel client_clock = scenario.client.clock;
  if (client_clock.rng_seed == 0) client_clock.rng_seed = master.child_seed(kSeedClientClock);
  const ClockModel server_clock{};  // reference-grade server

  // Time server.
  DelayModel delay = scenario.timeserver.model;
  if (delay.rng_seed == 0) delay.rng_seed = master.child_seed(kSeedTimeServer);
  TimeServerSim time_server(scenario.timeserver.server_id, delay,
                            scenario.timeserver.load_multiplier);
  SessionKeys session_keys;
  bool have_session = false;
  if (scenario.timeserver.authenticated) {
    session_keys = time_server.establish_session(store, 0);
    have_session = true;
  }

  // Event construction.
  std::vector<RxEvent> rx_events;
  std::uint64_t seq = 0;
  std::vector<std::vector<ScheduledBeacon>> schedules(aps.size());
  for (std::size_t i = 0; i < aps.size(); ++i) {
    const ApConfig& cfg = aps[i].transmitter->config();
    const std::uint64_t interval = cfg.interval_us();
    std::uint32_t count =
        duration_us > 0 ? static_cast<std::uint32_t>((duration_us - 1) / interval) : 0;
    count = std::min<std::uint32_t>(count, aps[i].chain->length() - 1);
    schedules[i] = aps[i].transmitter->emit_schedule(count);
    for (const auto& entry : schedules[i]) {
      if (aps[i].rogue) {
        // Rogue emissions only inside the attack window; timestamps biased.
        if (entry.actual_tx_us < scenario.attack.window_start_us ||
            entry.actual_tx_us > scenario.attack.window_end_us)
          continue;
        RxEvent ev{entry.actual_tx_us, RxEvent::Beacon, seq++, i, true, entry.frame, 0};
        ev.frame.timestamp_us = static_cast<std::uint64_t>(
            static_cast<std::int64_t>(ev.frame.timestamp_us) + scenario.attack.injected_bias_us);
        rx_events.push_back(std::move(ev));
        ++result.attacker.frames_injected;
      } else {
        rx_events.push_back({entry.actual_tx_us, RxEvent::Beacon, seq++, i, false, entry.frame, 0});
        ++result.beacons_emitted;
      }
      result.events.push_back(
          {entry.actual_tx_us, "tx",
           "ap=" + ap_id_to_string(cfg.ap_id) + " n=" + std::to_string(entry.n) +
               " scheduled_us=" + format_us(entry.scheduled_us)});
    }
  }

  // Beacon-layer attacks derived from the primary AP's traffic.
  if (!schedules.empty() &&
      (scenario.attack.kind == AttackKind::ForgeBeacon ||
       scenario.attack.kind == AttackKind::ReplaySequence ||
       scenario.attack.kind == AttackKind::Meacon)) {
    const ApConfig& cfg = aps.front().transmitter->config();
    const std::uint64_t interval = cfg.interval_us();
    if (scenario.attack.kind == AttackKind::ForgeBeacon) {
      const std::uint64_t start = std::max<std::uint64_t>(scenario.attack.window_start_us, interval);
      for (std::uint64_t t = start; t < duration_us && t <= scenario.attack.window_end_us;
           t += interval) {
        const std::uint32_t plausible_index = static_cast<std::uint32_t>(t / interval) + 1;
        BeaconFrame forged = forge_beacon(
            cfg.ap_id, aps.front().chain->id(), plausible_index,
            static_cast<std::uint64_t>(static_cast<std::int64_t>(t) +
                                       scenario.attack.injected_bias_us),
            attacker_rng);
        rx_events.push_back({t + interval / 3, RxEvent::Beacon, seq++, 0, true, forged, 0});
        ++result.attacker.frames_injected;
      }
    } else {
      // Replay / meacon of the observed sequence.
      std::vector<TimedFrame> observed;
      for (const auto& entry : schedules.front()) {
        if (entry.actual_tx_us < scenario.attack.window_start_us ||
            entry.actual_tx_us > scenario.attack.window_end_us)
          continue;
        observed.push_back({entry.actual_tx_us, entry.frame});
      }
      const std::uint64_t delay = scenario.attack.kind == AttackKind::Meacon
                                      ? scenario.attack.meacon_delay_us
                                      : 1000;  // prompt re-injection
      for (const auto& replayed : meacon(observed, delay)) {
        if (replayed.tx_time_us >= duration_us) continue;
        rx_events.push_back({replayed.tx_time_us, RxEvent::Beacon, seq++, 0, true,
                             replayed.frame, 0});
        ++result.attacker.frames_injected;
      }
    }
  }

  // GNSS fixes at 1 Hz and periodic server polls.
  for (std::uint32_t epoch = 1; static_cast<std::uint64_t>(epoch) * 1'000'000 <= duration_us;
       ++epoch) {
    rx_events.push_back(
        {static_cast<std::uint64_t>(epoch) * 1'000'000, RxEvent::Gnss, seq++, 0, false, {}, epoch});
  }
  const std::uint64_t poll_us =
      static_cast<std::uint64_t>(scenario.timeserver.poll_interval_s * 1e6);
  for (std::uint64_t t = poll_us; t < duration_us; t += poll_us) {
    rx_events.push_back({t, RxEvent::Poll, seq++, 0, false, {}, 0});
  }

  std::sort(rx_events.begin(), rx_events.end(), [](const RxEvent& a, const RxEvent& b) {
    if (a.t_us != b.t_us) return a.t_us < b.t_us;
    if (a.type != b.type) return a.type < b.type;
    return a.seq < b.seq;
  });

  // Event loop.
  std::int64_t offset_correction_us = 0;
  std::vector<std::pair<bool, std::size_t>> slot_origin;  // (attacker, ap_index) per frame slot
  for (const auto& ev : rx_events) {
    switch (ev.type) {
      case RxEvent::Gnss: {
        const GnssSample sample = sample_gnss(scenario.gnss, ev.t_us, ev.gnss_epoch);
        const std::uint64_t local = client_clock.read(ev.t_us);
        result.gnss_feed.push_back({local, sample.reported_time_us});
        result.events.push_back({ev.t_us, "gnss",
                                 "epoch=" + std::to_string(ev.gnss_epoch) +
                                     " reported_us=" + format_us(sample.reported_time_us)});
        break;
      }
      case RxEvent::Poll: {
        TimeExchange exchange = time_server.exchange(ev.t_us, client_clock, server_clock,
                                                     have_session ? &session_keys : nullptr);
        bool forged = false;
        if (scenario.attack.kind == AttackKind::ForgeTimeReply &&
            ev.t_us >= scenario.attack.window_start_us &&
            ev.t_us <= scenario.attack.window_end_us) {
          exchange = forge_time_reply(
              exchange,
              static_cast<std::uint64_t>(static_cast<std::int64_t>(exchange.t2) +
                                         scenario.attack.injected_bias_us),
              static_cast<std::uint64_t>(static_cast<std::int64_t>(exchange.t3) +
                                         scenario.attack.injected_bias_us));
          forged = true;
          ++result.attacker.time_replies_forged;
        }
        const bool auth_ok = have_session ? verify_exchange_auth(exchange, session_keys) : true;
        if (auth_ok) {
          const OffsetRtd est = compute_offset_rtd(exchange);
          offset_correction_us = static_cast<std::int64_t>(std::llround(est.offset_s * 1e6));
          result.server_feed.push_back({exchange.t4, est.offset_s});
          if (forged) ++result.attacker.time_replies_accepted;
        }
        result.events.push_back(
            {ev.t_us, "exchange",
             "server=" + exchange.server_id + " auth_ok=" + (auth_ok ? "1" : "0") +
                 (forged ? " forged=1" : "")});
        break;
      }
      case RxEvent::Beacon: {
        const std::uint64_t local_reading = client_clock.read(ev.t_us);
        const std::uint64_t local_estimate = static_cast<std::uint64_t>(
            static_cast<std::int64_t>(local_reading) + offset_correction_us);
        result.capture.push_back({ev.t_us, serialize(ev.frame)});
        const VerifyOutcome outcome = verifier.on_receive(ev.frame, local_reading, local_estimate);
        slot_origin.emplace_back(ev.attacker, ev.ap_index);
        result.events.push_back(
            {ev.t_us, "rx",
             "ap=" + ap_id_to_string(ev.frame.ap_id) + " n=" + std::to_string(ev.frame.index) +
                 " status=" + to_string(outcome.status) +
                 (ev.attacker ? " source=attacker" : " source=ap")});
        break;
      }
    }
  }

  // Final per-frame outcomes with provenance.
  const auto& log = verifier.frame_log();
  for (std::size_t i = 0; i < log.size(); ++i) {
    FrameOutcomeRow row;
    row.rx_time_us = log[i].rx_time_us;
    row.index = log[i].index;
    row.status = log[i].status;
    row.hash_walk_k = log[i].hash_walk_k;
    row.attacker_origin = slot_origin[i].first;
    row.ap_id = ap_id_to_string(aps[slot_origin[i].second].transmitter->config().ap_id);
    if (row.attacker_origin && log[i].status == VerifyStatus::Authenticated)
      ++result.attacker.frames_accepted;
    if (!row.attacker_origin && log[i].status == VerifyStatus::Authenticated)
      ++result.beacons_authenticated;
    result.frames.push_back(std::move(row));
  }

  for (const auto& obs : verifier.authenticated_observations()) {
    result.authenticated_feed.push_back({obs.rx_time_us, obs.beacon_timestamp_us});
  }

  // Detection reports per window size.
  const std::uint64_t effective_ramp =
      (scenario.gnss.max_bias_us == 0 || scenario.gnss.ramp_start_us >= duration_us)
          ? kNoRampStart
          : scenario.gnss.ramp_start_us;
  for (double window_s : scenario.detection.windows_s) {
    DetectionConfig cfg;
    cfg.window_s = window_s;
    cfg.epsilon_us = scenario.detection.epsilon_us;
    cfg.min_observations_per_window = scenario.detection.min_observations_per_window;
    cfg.reference = scenario.detection.reference;
    cfg.max_rule = scenario.detection.max_rule;
    result.detection[window_s] = run_detection(result.gnss_feed, result.authenticated_feed,
                                               result.server_feed, cfg, effective_ramp);
  }

  // Threshold measured from the attack-free part of the run.
  {
    std::vector<std::uint64_t> residual_times;
    std::vector<double> residuals =
        beacon_residuals_us(result.gnss_feed, result.authenticated_feed, &residual_times);
    std::vector<double> pre_ramp;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
      if (effective_ramp == kNoRampStart || residual_times[i] < effective_ramp)
        pre_ramp.push_back(residuals[i]);
    }
    if (pre_ramp.size() >= 100) result.calibrated_epsilon_us = calibrate_epsilon(pre_ramp);
  }

  result.cost.counters = verifier.counters();
  result.cost.table = scenario.cost_table;
  result.cost.modeled_cost_us = verifier.counters().total_cost_us(scenario.cost_table);
  result.cost.net_time = time_server.counters();

  result.primary_anchor = aps.front().transmitter->initial_anchor();
  result.primary_certificate = aps.front().transmitter->certificate();
  result.root_public_key = root_keys.public_key;

  // Causal order: tx rows were queued before the rx/verify rows they precede.
  std::stable_sort(result.events.begin(), result.events.end(),
                   [](const SimEvent& a, const SimEvent& b) { return a.t_us < b.t_us; });
  return result;
}

namespace {

std::string window_label(double window_s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", window_s);
  return buf;
}

}  // namespace

void write_outputs(const RunResult& result, const Scenario& scenario, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  {
    std::ofstream out(dir / "events.csv");
    out << "t_us,kind,detail\n";
    for (const auto& ev : result.events) {
      out << ev.t_us << ',' << ev.kind << ',' << ev.detail << '\n';
    }
  }
  write_capture_file((dir / "capture.bin").string(), result.capture);
  {
    std::ofstream out(dir / "anchor.bin", std::ios::binary);
    const Bytes blob = result.primary_anchor.serialize();
    out.write(reinterpret_cast<const char*>(blob.data()), blob.size());
  }
  {
    std::ofstream out(dir / "cert.bin", std::ios::binary);
    const Bytes blob = result.primary_certificate.serialize();
    out.write(reinterpret_cast<const char*>(blob.data()), blob.size());
  }
  {
    std::ofstream out(dir / "root.pub");
    out << to_hex(result.root_public_key) << '\n';
  }
  {
    std::ofstream out(dir / "frames.csv");
    out << "rx_time_us,ap_id,index,source,status,hash_walk_k\n";
    for (const auto& row : result.frames) {
      out << row.rx_time_us << ',' << row.ap_id << ',' << row.index << ','
          << (row.attacker_origin ? "attacker" : "ap") << ',' << to_string(row.status) << ','
          << row.hash_walk_k << '\n';
    }
  }
  for (const auto& [window_s, report] : result.detection) {
    std::ofstream out(dir / ("windows_w" + window_label(window_s) + "s.csv"));
    out << "start_s,mean_us,std_us,n,alarm\n";
    for (const auto& window : report.windows) {
      out << format_double(window.window_start_s) << ',' << format_double(window.mean_residual_us)
          << ',' << format_double(window.std_residual_us) << ',' << window.n_obs << ','
          << (window.alarm ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream out(dir / "summary.txt");
    out << "# run summary\n";
    out << "schema_version=" << scenario.schema_version << '\n';
    out << "master_seed=" << scenario.master_seed << '\n';
    out << "duration_s=" << format_double(scenario.duration_s) << '\n';
    out << "beacons_emitted=" << result.beacons_emitted << '\n';
    out << "beacons_authenticated=" << result.beacons_authenticated << '\n';
    out << "attacker_frames_injected=" << result.attacker.frames_injected << '\n';
    out << "attacker_frames_accepted=" << result.attacker.frames_accepted << '\n';
    out << "attacker_time_replies_forged=" << result.attacker.time_replies_forged << '\n';
    out << "attacker_time_replies_accepted=" << result.attacker.time_replies_accepted << '\n';
    out << "counter_sig_verifies=" << result.cost.counters.sig_verifies << '\n';
    out << "counter_cert_verifies=" << result.cost.counters.cert_verifies << '\n';
    out << "counter_hmacs=" << result.cost.counters.hmacs << '\n';
    out << "counter_hashes=" << result.cost.counters.hashes << '\n';
    out << "modeled_cost_us=" << format_double(result.cost.modeled_cost_us) << '\n';
    out << "net_exchanges=" << result.cost.net_time.exchanges << '\n';
    out << "net_authenticated_exchanges=" << result.cost.net_time.authenticated_exchanges << '\n';
    out << "net_key_establishments=" << result.cost.net_time.key_establishments << '\n';
    out << "net_load_units=" << format_double(result.cost.net_time.load_units) << '\n';
    if (result.calibrated_epsilon_us)
      out << "calibrated_epsilon_us=" << format_double(*result.calibrated_epsilon_us) << '\n';
    for (const auto& [window_s, report] : result.detection) {
      const std::string prefix = "detection_w" + window_label(window_s) + "s_";
      out << prefix << "false_alarms=" << report.false_alarm_count << '\n';
      if (report.first_alarm_time_us)
        out << prefix << "first_alarm_us=" << *report.first_alarm_time_us << '\n';
      if (report.time_to_detect_us)
        out << prefix << "time_to_detect_us=" << *report.time_to_detect_us << '\n';
    }
    out << "# scenario\n";
    out << scenario_to_json(scenario) << '\n';
  }
}

}  // namespace authtime
