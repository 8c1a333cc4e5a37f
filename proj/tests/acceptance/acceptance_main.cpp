// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria 1 and 6 drive the CLI binary; the rest run
// in-process through the library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "authtime/attacker.hpp"
#include "authtime/clock_model.hpp"
#include "authtime/cost.hpp"
#include "authtime/errors.hpp"
#include "authtime/rng.hpp"
#include "authtime/simulation.hpp"
#include "authtime/transmitter.hpp"
#include "authtime/verifier.hpp"
#include "support/tesla_oracle.hpp"

#ifndef AUTHTIME_CLI_PATH
#error "AUTHTIME_CLI_PATH must point at the CLI binary"
#endif

using namespace authtime;

namespace {

struct Harness {
  int failures = 0;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      notes.push_back(what);
    }
  }

  // Runs one criterion, printing a single pass/fail line with its runtime.
  void criterion(int number, const std::string& title, const std::function<void(Harness&)>& body) {
    Harness local;
    const auto start = std::chrono::steady_clock::now();
    try {
      body(local);
    } catch (const std::exception& e) {
      local.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s (%.2fs)\n", local.failures == 0 ? "PASS" : "FAIL", number,
                title.c_str(), seconds);
    for (const auto& note : local.notes) std::printf("       - %s\n", note.c_str());
    failures += local.failures;
  }
};

std::string run_cli(const std::string& args) {
  const std::string command = std::string(AUTHTIME_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) throw std::runtime_error("cannot spawn CLI");
  std::string output;
  char buffer[4096];
  std::size_t got;
  while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) output.append(buffer, got);
  pclose(pipe);
  return output;
}

// Parses "key=value" tokens, including inside "# k=v k=v" comment lines.
std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line[0] == '#') line = line.substr(1);
    std::istringstream words(line);
    std::string word;
    while (words >> word) {
      const auto eq = word.find('=');
      if (eq != std::string::npos) out[word.substr(0, eq)] = word.substr(eq + 1);
    }
  }
  return out;
}

double to_double(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("missing key: " + key);
  return std::stod(it->second);
}

Scenario detection_scenario(std::uint64_t seed) {
  Scenario s;
  s.duration_s = 300.0;
  s.master_seed = seed;
  ApScenario ap;
  ap.config.ap_id = ap_id_from_string("02:00:00:00:00:01");
  // Uniform timestamp error with sigma 25.5 us: amplitude 25.5 * sqrt(3) over
  // one 102.4 ms interval, i.e. 431.32 ppm.
  ap.config.tsf_ppm = 431.32;
  ap.anchor_period = 600;
  ap.config.anchor_every = 600;
  s.aps.push_back(ap);
  s.gnss.ramp_start_us = 20'000'000;
  s.gnss.ramp_rate_us_per_s = 5000.0;
  s.gnss.max_bias_us = 120'000;
  s.gnss.hold_after_max = true;
  s.detection.windows_s = {1.0, 3.0, 5.0};
  s.detection.epsilon_us = 25.5;
  s.detection.min_observations_per_window = 5;
  return s;
}

Scenario attack_scenario(AttackKind kind, std::uint64_t seed, bool legacy = false,
                         bool server_auth = true) {
  Scenario s;
  s.duration_s = 120.0;
  s.master_seed = seed;
  ApScenario ap;
  ap.config.ap_id = ap_id_from_string("02:00:00:00:00:01");
  ap.anchor_period = 600;
  ap.config.anchor_every = 600;
  s.aps.push_back(ap);
  s.gnss.max_bias_us = 0;
  s.client.legacy_mode = legacy;
  s.timeserver.authenticated = server_auth;
  s.attack.kind = kind;
  s.attack.injected_bias_us = 120'000;
  if (kind == AttackKind::Meacon) {
    // At least the safety margin; two TBTTs guarantees every frame arrives
    // after its key disclosure.
    s.attack.meacon_delay_us = 204'800;
  }
  if (kind == AttackKind::ForgeTimeReply) {
    s.timeserver.poll_interval_s = 0.1;  // 1199 replies in 120 s
  }
  return s;
}

double stddev(const std::vector<double>& values) {
  double mean = 0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sq = 0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return std::sqrt(sq / static_cast<double>(values.size() - 1));
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main() {
  Harness h;

  // -------------------------------------------------------------------------
  h.criterion(1, "cost CLI reproduces the urban transit numbers", [](Harness& c) {
    const auto start = std::chrono::steady_clock::now();
    const std::string out = run_cli("cost --speed 15 --coverage 100 --anchor-period 600 --k 599");
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto kv = parse_kv(out);
    const double total = to_double(kv, "total_auth_us");
    const double fraction = to_double(kv, "fraction_percent");
    const double transit = to_double(kv, "transit_s");
    const double beacons = to_double(kv, "beacons");
    c.expect(std::abs(total - 3211.0) <= 15.0, "total_auth_us=" + std::to_string(total));
    c.expect(std::abs(fraction - 0.013) <= 0.001, "fraction=" + std::to_string(fraction));
    c.expect(std::abs(transit - 24.0) <= 0.05, "transit_s=" + std::to_string(transit));
    c.expect(std::abs(beacons - 234.0) <= 1.0, "beacons=" + std::to_string(beacons));
    c.expect(seconds < 1.0, "runtime " + std::to_string(seconds) + "s");
  });

  // -------------------------------------------------------------------------
  h.criterion(2, "cost formulas evaluate exactly", [](Harness& c) {
    const CostTable table;  // 52 / 7.67 / 1.64
    c.expect(std::abs(first_authentication_cost(599, false, table) - 1042.03) < 1e-6,
             "first_authentication_cost(599)");
    c.expect(std::abs(steady_state_cost(table) - 9.31) < 1e-6, "steady_state_cost");
  });

  // -------------------------------------------------------------------------
  h.criterion(3, "detection experiment: 120 ms ramp, windows {1,3,5} s, 20 seeds",
              [](Harness& c) {
    std::uint32_t false_alarms = 0;
    std::uint32_t qualifying_checked = 0, qualifying_alarmed = 0;
    std::map<double, std::vector<double>> pre_ramp_means;
    const std::uint64_t ramp_start = 20'000'000;

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Scenario s = detection_scenario(seed);
      const RunResult result = run(s);
      for (const auto& [window_s, report] : result.detection) {
        false_alarms += report.false_alarm_count;
        c.expect(report.first_alarm_time_us.has_value(),
                 "no alarm at all for w=" + std::to_string(window_s) +
                     " seed=" + std::to_string(seed));
        const double window_us = window_s * 1e6;
        for (const auto& window : report.windows) {
          const std::uint64_t start_us = static_cast<std::uint64_t>(window.window_start_s * 1e6);
          // Collect attack-free window means for (c).
          if (start_us + static_cast<std::uint64_t>(window_us) <= ramp_start &&
              window.n_obs > 0) {
            pre_ramp_means[window_s].push_back(window.mean_residual_us);
          }
          // (b): a window qualifies once the bias (held GNSS fix included)
          // exceeds epsilon by 3x the window's mean-noise std.
          if (start_us < ramp_start + 1'000'000 || window.n_obs < 5) continue;
          const std::int64_t bias =
              gnss_bias_us(s.gnss, start_us - 1'000'000);  // fix may lag 1 s
          const double mean_noise_std = 25.5 / std::sqrt(static_cast<double>(window.n_obs));
          if (static_cast<double>(bias) > 25.5 + 3.0 * mean_noise_std) {
            ++qualifying_checked;
            if (window.alarm) ++qualifying_alarmed;
          }
        }
      }
    }
    c.expect(false_alarms == 0,
             "(a) false alarms before ramp_start: " + std::to_string(false_alarms));
    c.expect(qualifying_checked > 1000, "(b) enough qualifying windows");
    c.expect(qualifying_alarmed == qualifying_checked,
             "(b) alarmed " + std::to_string(qualifying_alarmed) + "/" +
                 std::to_string(qualifying_checked));
    const double s1 = stddev(pre_ramp_means[1.0]);
    const double s3 = stddev(pre_ramp_means[3.0]);
    const double s5 = stddev(pre_ramp_means[5.0]);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "(c) window-mean std: w1=%.2f w3=%.2f w5=%.2f us", s1, s3, s5);
    c.expect(s1 > s3 && s3 > s5, buf);
  });

  // -------------------------------------------------------------------------
  h.criterion(4, "attacker frames never reach the authenticated feed", [](Harness& c) {
    for (AttackKind kind : {AttackKind::ForgeBeacon, AttackKind::ReplaySequence,
                            AttackKind::Meacon, AttackKind::RogueAp}) {
      const Scenario s = attack_scenario(kind, 40 + static_cast<std::uint64_t>(kind));
      const RunResult result = run(s);
      const std::string label = to_string(kind);
      c.expect(result.attacker.frames_injected >= 1000,
               label + ": injected " + std::to_string(result.attacker.frames_injected));
      c.expect(result.attacker.frames_accepted == 0,
               label + ": accepted " + std::to_string(result.attacker.frames_accepted));
      c.expect(result.beacons_authenticated > 0, label + ": honest feed still works");
      c.expect(result.authenticated_feed.size() == result.beacons_authenticated,
               label + ": detector feed only contains authenticated beacons");
    }
    {
      const Scenario s = attack_scenario(AttackKind::ForgeTimeReply, 50);
      const RunResult result = run(s);
      c.expect(result.attacker.time_replies_forged >= 1000,
               "forge_time_reply: forged " + std::to_string(result.attacker.time_replies_forged));
      c.expect(result.attacker.time_replies_accepted == 0,
               "forge_time_reply: accepted " +
                   std::to_string(result.attacker.time_replies_accepted));
    }
    // Legacy / unauthenticated control runs show the gap being closed.
    {
      const Scenario s = attack_scenario(AttackKind::ForgeBeacon, 51, /*legacy=*/true);
      const RunResult result = run(s);
      c.expect(result.attacker.frames_accepted > 0, "legacy client accepts forged beacons");
    }
    {
      const Scenario s = attack_scenario(AttackKind::ForgeTimeReply, 52, false,
                                         /*server_auth=*/false);
      const RunResult result = run(s);
      c.expect(result.attacker.time_replies_accepted > 0,
               "unauthenticated client accepts forged time replies");
    }
  });

  // -------------------------------------------------------------------------
  h.criterion(5, "brute-force oracle agrees on 10^4 randomized cases", [](Harness& c) {
    Rng rng(160'920);
    std::uint64_t cases = 0;
    std::uint64_t disagreements = 0;
    constexpr std::uint64_t kInterval = 102'400;

    while (cases < 10'000) {
      const std::uint32_t length = 4 + static_cast<std::uint32_t>(rng.uniform_below(61));
      const std::uint32_t period = 1 + static_cast<std::uint32_t>(rng.uniform_below(length));
      Rng world_rng(rng.next_u64());
      const HashChain chain =
          HashChain::generate(world_rng.random_bytes32(), length, period,
                              {0, static_cast<std::uint64_t>(length + 2) * kInterval});
      const KeyPair root = ed25519().keypair_from_seed(world_rng.random_bytes32());
      const KeyPair ap = ed25519().keypair_from_seed(world_rng.random_bytes32());
      const ApId ap_id = ap_id_from_string("02:00:00:00:00:01");
      const ApCertificate cert =
          issue_certificate(ap_id, ap.public_key, "root", root.private_key);
      const SignedAnchor anchor0 = sign_anchor(chain, 0, ap.private_key, ap_id);

      Verifier verifier(VerifierConfig{}, TrustStore(root.public_key));
      if (!verifier.install_anchor(anchor0, cert)) {
        c.expect(false, "anchor install failed");
        return;
      }
      testsupport::OracleVerifier oracle(0, chain.element(0), 0, chain.validity().end_us,
                                         VerifierConfig{}.safety_margin_us);

      std::uint32_t n = 1;
      while (n < length) {
        BeaconFrame frame = build_beacon(chain, n, n * kInterval, 100, ap_id);
        std::uint64_t rx = n * kInterval;
        const double dice = rng.uniform();
        if (dice < 0.08) {
          frame.mac[rng.uniform_below(32)] ^=
              static_cast<std::uint8_t>(1 + rng.uniform_below(255));
        } else if (dice < 0.16) {
          frame.disclosed_key[rng.uniform_below(32)] ^=
              static_cast<std::uint8_t>(1 + rng.uniform_below(255));
        } else if (dice < 0.22) {
          frame.timestamp_us ^= 1ULL << rng.uniform_below(20);
        } else if (dice < 0.28) {
          rx = (n + 1) * kInterval + rng.uniform_below(50'000);
        }
        const VerifyOutcome got = verifier.on_receive(frame, rx, rx);
        const testsupport::OracleVerdict want = oracle.on_receive(frame, rx);
        if (got.status != want.status || got.hash_walk_k != want.k) ++disagreements;
        ++cases;
        if (rng.uniform() < 0.15) n += 1 + static_cast<std::uint32_t>(rng.uniform_below(3));
        ++n;
      }
      const auto& log = verifier.frame_log();
      if (log.size() != oracle.verdicts.size()) {
        ++disagreements;
      } else {
        for (std::size_t i = 0; i < log.size(); ++i) {
          if (log[i].status != oracle.verdicts[i]) ++disagreements;
        }
      }
      if (verifier.counters().hashes != oracle.hashes ||
          verifier.counters().hmacs != oracle.hmacs ||
          verifier.authenticated_observations().size() != oracle.authenticated)
        ++disagreements;
    }
    c.expect(cases >= 10'000, "case count " + std::to_string(cases));
    c.expect(disagreements == 0, "disagreements: " + std::to_string(disagreements));

    // Telescoping: authenticating m beacons from distance k costs k + m hashes.
    Rng trng(5);
    const HashChain chain =
        HashChain::generate(trng.random_bytes32(), 200, 1, {0, 202 * kInterval});
    const KeyPair root = ed25519().keypair_from_seed(trng.random_bytes32());
    const KeyPair ap = ed25519().keypair_from_seed(trng.random_bytes32());
    const ApId ap_id = ap_id_from_string("02:00:00:00:00:01");
    const ApCertificate cert = issue_certificate(ap_id, ap.public_key, "root", root.private_key);
    const SignedAnchor anchor0 = sign_anchor(chain, 0, ap.private_key, ap_id);
    for (std::uint32_t k : {1u, 10u, 50u, 120u}) {
      Verifier verifier(VerifierConfig{}, TrustStore(root.public_key));
      verifier.install_anchor(anchor0, cert);
      const std::uint32_t m = 30;
      for (std::uint32_t n = k; n <= k + m; ++n) {
        const BeaconFrame frame = build_beacon(chain, n, n * kInterval, 100, ap_id);
        verifier.on_receive(frame, n * kInterval, n * kInterval);
      }
      c.expect(verifier.counters().hashes == k + m,
               "telescoping k=" + std::to_string(k) + ": hashes " +
                   std::to_string(verifier.counters().hashes));
      c.expect(verifier.authenticated_observations().size() == m, "telescoping m");
    }
  });

  // -------------------------------------------------------------------------
  h.criterion(6, "network-time statistics, forged-reply rejection, load report",
              [](Harness& c) {
    const auto start = std::chrono::steady_clock::now();
    const std::string out = run_cli("ntsim --preset nts.sth1 --count 10000 --auth on --seed 7");
    const auto kv = parse_kv(out);
    // Configured moments for this server path.
    const double rtd_mu = 2.765e-2, rtd_sigma = 7.151e-3;
    const double off_mu = 9.380e-4, off_sigma = 3.309e-3;
    const double n = 10'000;
    const double rtd_mean = to_double(kv, "rtd_mean_s");
    const double off_mean = to_double(kv, "offset_mean_s");
    c.expect(std::abs(rtd_mean - rtd_mu) < 3 * rtd_sigma / std::sqrt(n),
             "rtd mean " + std::to_string(rtd_mean));
    c.expect(std::abs(off_mean - off_mu) < 3 * off_sigma / std::sqrt(n),
             "offset mean " + std::to_string(off_mean));

    const std::string forged =
        run_cli("ntsim --preset nts.sth1 --count 1000 --auth on --seed 8 --forge-every 1");
    const auto fkv = parse_kv(forged);
    c.expect(to_double(fkv, "discarded") == 1000.0,
             "forged replies discarded: " + fkv.at("discarded"));
    c.expect(to_double(fkv, "accepted") == 0.0, "forged replies accepted");

    const std::string plain = run_cli("ntsim --preset nts.sth1 --count 1000 --auth off --seed 9");
    const auto pkv = parse_kv(plain);
    const double authed_load = to_double(kv, "per_exchange_load");
    const double plain_load = to_double(pkv, "per_exchange_load");
    c.expect(std::abs(authed_load / plain_load - 6.0) < 1e-9,
             "load ratio " + std::to_string(authed_load / plain_load));
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(seconds < 10.0, "runtime " + std::to_string(seconds) + "s");
  });

  // -------------------------------------------------------------------------
  h.criterion(7, "codec: 10^5 bit-exact round-trips, size bound, decoder fuzz",
              [](Harness& c) {
    Rng rng(31'337);
    Rng setup(1);
    const HashChain chain =
        HashChain::generate(setup.random_bytes32(), 16, 4, {0, 18 * 102'400ULL});
    const KeyPair root = ed25519().keypair_from_seed(setup.random_bytes32());
    const KeyPair ap = ed25519().keypair_from_seed(setup.random_bytes32());
    const ApId ap_id = ap_id_from_string("02:00:00:00:00:01");
    const ApCertificate cert =
        issue_certificate(ap_id, ap.public_key, "root", root.private_key);
    const SignedAnchor anchor = sign_anchor(chain, 4, ap.private_key, ap_id);

    std::uint64_t round_trips = 0, mismatches = 0, oversize_accepted = 0;
    for (int i = 0; i < 100'000; ++i) {
      BeaconFrame frame;
      frame.timestamp_us = rng.next_u64();
      frame.beacon_interval_tu = static_cast<std::uint16_t>(rng.uniform_below(65'536));
      rng.fill(frame.ap_id);
      rng.fill(frame.chain_id);
      frame.index = 1 + static_cast<std::uint32_t>(rng.uniform_below(1'000'000));
      frame.mac = rng.random_bytes32();
      frame.disclosed_key = rng.random_bytes32();
      if (rng.uniform() < 0.2) frame.anchor = anchor;
      if (rng.uniform() < 0.2) frame.certificate = cert;
      if (rng.uniform() < 0.3) {
        frame.vendor_tail.resize(rng.uniform_below(2400));  // sometimes too big
        rng.fill(frame.vendor_tail);
      }
      try {
        const Bytes wire = serialize(frame);
        if (wire.size() > kMaxFrameOctets) ++oversize_accepted;
        const BeaconFrame back = deserialize(wire);
        if (!(back == frame) || serialize(back) != wire) ++mismatches;
        ++round_trips;
      } catch (const OversizeFrame&) {
        // construction failed loudly: exactly what the bound demands
      }
    }
    c.expect(round_trips > 50'000, "round trips " + std::to_string(round_trips));
    c.expect(mismatches == 0, "mismatches " + std::to_string(mismatches));
    c.expect(oversize_accepted == 0, "oversize frames slipped through");

    std::uint64_t crashes = 0, outcomes = 0;
    for (int i = 0; i < 100'000; ++i) {
      Bytes bytes;
      if (i % 2 == 0) {
        bytes.resize(rng.uniform_below(300));
        rng.fill(bytes);
      } else {
        BeaconFrame frame;
        frame.timestamp_us = rng.next_u64();
        rng.fill(frame.ap_id);
        rng.fill(frame.chain_id);
        frame.index = 1;
        if (rng.uniform() < 0.3) frame.anchor = anchor;
        bytes = serialize(frame);
        bytes.resize(rng.uniform_below(bytes.size() + 1));
        for (int b = 0; b < 4 && !bytes.empty(); ++b)
          bytes[rng.uniform_below(bytes.size())] ^= static_cast<std::uint8_t>(rng.next_u64());
      }
      try {
        (void)deserialize(bytes);
        ++outcomes;
      } catch (const DecodeError&) {
        ++outcomes;
      } catch (...) {
        ++crashes;
      }
    }
    c.expect(outcomes == 100'000 && crashes == 0,
             "fuzz outcomes " + std::to_string(outcomes) + ", unexpected " +
                 std::to_string(crashes));
  });

  // -------------------------------------------------------------------------
  h.criterion(8, "identical seeds give byte-identical outputs", [](Harness& c) {
    namespace fs = std::filesystem;
    Scenario s = detection_scenario(12'345);
    s.duration_s = 60.0;
    s.aps[0].anchor_period = 100;  // the shorter run has a shorter chain
    s.aps[0].config.anchor_every = 100;
    s.attack.kind = AttackKind::Meacon;
    s.attack.meacon_delay_us = 204'800;
    const fs::path tmp = fs::temp_directory_path() / "authtime_acceptance_det";
    fs::remove_all(tmp);
    const RunResult a = run(s);
    const RunResult b = run(s);
    write_outputs(a, s, (tmp / "a").string());
    write_outputs(b, s, (tmp / "b").string());
    for (const char* name :
         {"events.csv", "frames.csv", "windows_w1s.csv", "windows_w3s.csv", "windows_w5s.csv",
          "summary.txt", "capture.bin", "anchor.bin", "cert.bin", "root.pub"}) {
      const std::string left = slurp(tmp / "a" / name);
      c.expect(!left.empty(), std::string(name) + " written");
      c.expect(left == slurp(tmp / "b" / name), std::string(name) + " byte-identical");
    }
    fs::remove_all(tmp);
  });

  std::printf("%s\n", h.failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED");
  return h.failures == 0 ? 0 : 1;
}
