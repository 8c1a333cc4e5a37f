// Command-line front end: scenario simulation, chain management, capture
// verification, cost model queries, and the network-time exchange simulator.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "authtime/attacker.hpp"
#include "authtime/capture.hpp"
#include "authtime/cost.hpp"
#include "authtime/errors.hpp"
#include "authtime/net_time.hpp"
#include "authtime/scenario.hpp"
#include "authtime/simulation.hpp"
#include "authtime/verifier.hpp"

namespace {

using namespace authtime;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

Bytes read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string& raw = buffer.str();
  return Bytes(raw.begin(), raw.end());
}

std::string read_file_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// ---------------------------------------------------------------------------
// chain gen / inspect
// ---------------------------------------------------------------------------

constexpr char kChainMagic[4] = {'A', 'T', 'C', '1'};

struct ChainFile {
  Digest32 seed{};
  std::uint32_t length = 0;
  std::uint32_t anchor_period = 0;
  ChainValidity validity{};
};

void write_chain_file(const std::string& path, const ChainFile& file, const ChainId& id) {
  Bytes out;
  put_bytes(out, ByteView(reinterpret_cast<const std::uint8_t*>(kChainMagic), 4));
  put_bytes(out, id);
  put_u32(out, file.length);
  put_u32(out, file.anchor_period);
  put_u64(out, file.validity.start_us);
  put_u64(out, file.validity.end_us);
  put_bytes(out, file.seed);
  std::ofstream stream(path, std::ios::binary);
  if (!stream) throw Error("cannot open chain file for writing: " + path);
  stream.write(reinterpret_cast<const char*>(out.data()), out.size());
}

ChainFile read_chain_file(const std::string& path) {
  const Bytes raw = read_file_bytes(path);
  ByteReader reader(raw);
  for (char expected : kChainMagic) {
    if (reader.u8() != static_cast<std::uint8_t>(expected))
      throw DecodeError("bad chain file magic", reader.offset() - 1);
  }
  ChainFile file;
  ChainId id;
  reader.take_into(id);
  file.length = reader.u32();
  file.anchor_period = reader.u32();
  file.validity.start_us = reader.u64();
  file.validity.end_us = reader.u64();
  reader.take_into(file.seed);
  if (!reader.empty()) throw DecodeError("trailing bytes in chain file", reader.offset());
  return file;
}

int run_chain_gen(const std::string& seed_hex, std::uint32_t length, std::uint32_t period,
                  std::uint64_t validity_start_us, std::uint64_t validity_end_us,
                  const std::string& out_path) {
  ChainFile file;
  file.seed = digest_from_hex(seed_hex);
  file.length = length;
  file.anchor_period = period;
  if (validity_end_us == 0)
    validity_end_us = validity_start_us + static_cast<std::uint64_t>(length + 1) * 102'400;
  file.validity = {validity_start_us, validity_end_us};
  HashChain chain = HashChain::generate(file.seed, length, period, file.validity);
  write_chain_file(out_path, file, chain.id());
  std::cout << "chain_id=" << to_hex(chain.id()) << "\n"
            << "length=" << chain.length() << "\n"
            << "anchor_period=" << chain.anchor_period() << "\n"
            << "h0=" << to_hex(chain.element(0)) << "\n";
  return kExitOk;
}

int run_chain_inspect(const std::string& in_path, std::int64_t element_index) {
  const ChainFile file = read_chain_file(in_path);
  HashChain chain = HashChain::generate(file.seed, file.length, file.anchor_period, file.validity);
  std::cout << "chain_id=" << to_hex(chain.id()) << "\n"
            << "length=" << chain.length() << "\n"
            << "anchor_period=" << chain.anchor_period() << "\n"
            << "validity_start_us=" << file.validity.start_us << "\n"
            << "validity_end_us=" << file.validity.end_us << "\n"
            << "h0=" << to_hex(chain.element(0)) << "\n";
  if (element_index >= 0) {
    std::cout << "h" << element_index << "="
              << to_hex(chain.element(static_cast<std::uint32_t>(element_index))) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int run_verify(const std::string& capture_path, const std::string& anchor_path,
               const std::string& cert_path, const std::string& root_path,
               std::uint64_t safety_margin_us, bool legacy) {
  const SignedAnchor anchor = SignedAnchor::deserialize(read_file_bytes(anchor_path));
  const ApCertificate cert = ApCertificate::deserialize(read_file_bytes(cert_path));

  TrustStore store;
  if (!root_path.empty()) {
    std::string hex = read_file_text(root_path);
    while (!hex.empty() && (hex.back() == '\n' || hex.back() == '\r')) hex.pop_back();
    store = TrustStore(from_hex(hex));
  }

  VerifierConfig cfg;
  cfg.safety_margin_us = safety_margin_us;
  cfg.legacy_mode = legacy;
  Verifier verifier(cfg, store);
  if (root_path.empty()) verifier.pin_certificate(cert);
  if (!verifier.install_anchor(anchor, cert)) {
    std::cerr << "error: anchor failed verification against the certificate\n";
    return kExitRuntime;
  }

  const auto records = read_capture_file(capture_path);
  for (const auto& record : records) {
    try {
      const BeaconFrame frame = deserialize(record.frame_bytes);
      verifier.on_receive(frame, record.rx_time_us, record.rx_time_us);
    } catch (const DecodeError& e) {
      std::cerr << "# undecodable frame at rx_time_us=" << record.rx_time_us << ": " << e.what()
                << "\n";
    }
  }

  std::cout << "rx_time_us,index,status,hash_walk_k\n";
  for (const auto& row : verifier.frame_log()) {
    std::cout << row.rx_time_us << ',' << row.index << ',' << to_string(row.status) << ','
              << row.hash_walk_k << '\n';
  }
  const CostCounters& counters = verifier.counters();
  std::cout << "# sig_verifies=" << counters.sig_verifies
            << " cert_verifies=" << counters.cert_verifies << " hmacs=" << counters.hmacs
            << " hashes=" << counters.hashes << "\n";
  std::cout << "# authenticated=" << verifier.authenticated_observations().size()
            << " frames=" << verifier.frame_log().size() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// cost
// ---------------------------------------------------------------------------

int run_cost(double speed_kmh, double coverage_m, std::uint32_t anchor_period, std::uint32_t k,
             const CostTable& table, bool include_cert, double interval_us) {
  const TransitCostReport report = transit_cost_report(speed_kmh, coverage_m, anchor_period,
                                                       table, k, include_cert, interval_us);
  std::printf("transit_s=%.4f\n", report.transit_s);
  std::printf("beacons=%llu\n", static_cast<unsigned long long>(report.beacons));
  std::printf("first_auth_us=%.4f\n", first_authentication_cost(k, include_cert, table));
  std::printf("steady_state_us=%.4f\n", steady_state_cost(table));
  std::printf("total_auth_us=%.4f\n", report.total_auth_us);
  std::printf("total_auth_ms=%.4f\n", report.total_auth_us * 1e-3);
  std::printf("fraction_percent=%.6f\n", report.fraction * 100.0);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ntsim
// ---------------------------------------------------------------------------

struct NtsimPreset {
  const char* name;
  double rtd_mean, rtd_std, offset_mean, offset_std;
};

// Measured per-server path statistics (seconds).
constexpr NtsimPreset kPresets[] = {
    {"nts.sth2", 2.825e-2, 7.200e-3, 1.228e-3, 4.331e-3},
    {"nts.sth1", 2.765e-2, 7.151e-3, 9.380e-4, 3.309e-3},
    {"nts.sth", 2.774e-2, 6.970e-3, 1.042e-3, 3.131e-3},
    {"sth1", 2.673e-2, 6.512e-3, 3.177e-4, 3.409e-3},
    {"sth2", 2.631e-2, 5.526e-3, 4.223e-4, 2.975e-3},
    {"sptime3", 3.931e-2, 1.375e-3, -5.802e-3, 6.985e-3},
};

DelayModel load_delay_model(const std::string& model_path, const std::string& preset_name) {
  DelayModel model;
  if (!preset_name.empty()) {
    for (const auto& preset : kPresets) {
      if (preset_name == preset.name) {
        model.rtd_mean_s = preset.rtd_mean;
        model.rtd_std_s = preset.rtd_std;
        model.offset_mean_s = preset.offset_mean;
        model.offset_std_s = preset.offset_std;
        return model;
      }
    }
    throw ConfigError("--preset", "unknown preset: " + preset_name);
  }
  if (model_path.empty()) throw ConfigError("--model", "either --model or --preset is required");
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(read_file_text(model_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("--model", std::string("invalid JSON: ") + e.what());
  }
  model.rtd_mean_s = root.value("rtd_mean_s", model.rtd_mean_s);
  model.rtd_std_s = root.value("rtd_std_s", model.rtd_std_s);
  model.offset_mean_s = root.value("offset_mean_s", model.offset_mean_s);
  model.offset_std_s = root.value("offset_std_s", model.offset_std_s);
  return model;
}

int run_ntsim(const std::string& model_path, const std::string& preset, std::uint32_t count,
              bool auth, std::uint64_t seed, double load_multiplier, std::uint32_t forge_every,
              std::int64_t forge_bias_us) {
  DelayModel model = load_delay_model(model_path, preset);
  model.rng_seed = seed;
  const std::string server_id = preset.empty() ? "timeserver" : preset;

  TrustStore store;
  store.add_time_server(server_id);
  TimeServerSim server(server_id, model, load_multiplier);
  SessionKeys keys;
  if (auth) keys = server.establish_session(store, 0);

  const ClockModel client_clock{};
  const ClockModel server_clock{};

  double sum_rtd = 0, sum_rtd_sq = 0, sum_offset = 0, sum_offset_sq = 0;
  std::uint32_t accepted = 0, discarded = 0;

  std::cout << "i,t1_us,t2_us,t3_us,t4_us,offset_s,rtd_s,auth_ok\n";
  std::uint64_t t = 1'000'000;
  for (std::uint32_t i = 0; i < count; ++i, t += 1'000'000) {
    TimeExchange x = server.exchange(t, client_clock, server_clock, auth ? &keys : nullptr);
    if (forge_every > 0 && (i + 1) % forge_every == 0) {
      x = forge_time_reply(x,
                           static_cast<std::uint64_t>(static_cast<std::int64_t>(x.t2) + forge_bias_us),
                           static_cast<std::uint64_t>(static_cast<std::int64_t>(x.t3) + forge_bias_us));
    }
    const bool auth_ok = auth ? verify_exchange_auth(x, keys) : true;
    const OffsetRtd est = compute_offset_rtd(x);
    std::printf("%u,%llu,%llu,%llu,%llu,%.9f,%.9f,%d\n", i,
                static_cast<unsigned long long>(x.t1), static_cast<unsigned long long>(x.t2),
                static_cast<unsigned long long>(x.t3), static_cast<unsigned long long>(x.t4),
                est.offset_s, est.rtd_s, auth_ok ? 1 : 0);
    if (auth_ok) {
      ++accepted;
      sum_rtd += est.rtd_s;
      sum_rtd_sq += est.rtd_s * est.rtd_s;
      sum_offset += est.offset_s;
      sum_offset_sq += est.offset_s * est.offset_s;
    } else {
      ++discarded;
    }
  }

  if (accepted > 0) {
    const double n = accepted;
    const double rtd_mean = sum_rtd / n;
    const double offset_mean = sum_offset / n;
    const double rtd_var = n > 1 ? (sum_rtd_sq - n * rtd_mean * rtd_mean) / (n - 1) : 0.0;
    const double offset_var =
        n > 1 ? (sum_offset_sq - n * offset_mean * offset_mean) / (n - 1) : 0.0;
    std::printf("# rtd_mean_s=%.6e rtd_std_s=%.6e\n", rtd_mean,
                std::sqrt(std::max(0.0, rtd_var)));
    std::printf("# offset_mean_s=%.6e offset_std_s=%.6e\n", offset_mean,
                std::sqrt(std::max(0.0, offset_var)));
  }
  const NetTimeCounters& counters = server.counters();
  std::printf("# accepted=%u discarded=%u\n", accepted, discarded);
  std::printf("# exchanges=%llu authenticated=%llu key_establishments=%llu\n",
              static_cast<unsigned long long>(counters.exchanges),
              static_cast<unsigned long long>(counters.authenticated_exchanges),
              static_cast<unsigned long long>(counters.key_establishments));
  std::printf("# load_units=%.1f per_exchange_load=%.2f multiplier=%.2f\n", counters.load_units,
              counters.exchanges ? counters.load_units / static_cast<double>(counters.exchanges)
                                 : 0.0,
              load_multiplier);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"authenticated beacon/time broadcast simulator"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a scenario end to end");
  std::string scenario_path, out_dir = "out";
  simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  simulate->add_option("--out", out_dir, "output directory");

  // chain
  auto* chain = app.add_subcommand("chain", "hash-chain utilities");
  chain->require_subcommand(1);
  auto* gen = chain->add_subcommand("gen", "generate a chain file");
  std::string seed_hex, chain_out = "chain.bin";
  std::uint32_t gen_length = 1000, gen_period = 100;
  std::uint64_t gen_validity_start = 0, gen_validity_end = 0;
  gen->add_option("--seed", seed_hex, "32-byte seed, hex")->required();
  gen->add_option("--length", gen_length, "number of usable key elements");
  gen->add_option("--anchor-period", gen_period, "intermediate anchor spacing");
  gen->add_option("--validity-start-us", gen_validity_start, "validity window start");
  gen->add_option("--validity-end-us", gen_validity_end, "validity window end (0: derived)");
  gen->add_option("--out", chain_out, "output chain file");
  auto* inspect = chain->add_subcommand("inspect", "print chain file details");
  std::string chain_in;
  std::int64_t element_index = -1;
  inspect->add_option("--in", chain_in, "chain file")->required();
  inspect->add_option("--element", element_index, "also print element at this index");

  // verify
  auto* verify = app.add_subcommand("verify", "replay a capture through the verifier");
  std::string capture_path, anchor_path, cert_path, root_path;
  std::uint64_t margin_us = 10'000;
  bool legacy = false;
  verify->add_option("--capture", capture_path, "capture file")->required();
  verify->add_option("--anchor", anchor_path, "signed anchor file")->required();
  verify->add_option("--cert", cert_path, "AP certificate file")->required();
  verify->add_option("--root", root_path, "trust root public key (hex file); omit to pin cert");
  verify->add_option("--safety-margin-us", margin_us, "TESLA safety margin");
  verify->add_flag("--legacy", legacy, "no-authentication baseline client");

  // cost
  auto* cost = app.add_subcommand("cost", "closed-form authentication cost");
  double speed_kmh = 15.0, coverage_m = 100.0, interval_us = 102'400.0;
  std::uint32_t anchor_period = 600, k_worst = 599;
  CostTable table;
  bool include_cert = false;
  cost->add_option("--speed", speed_kmh, "client speed, km/h");
  cost->add_option("--coverage", coverage_m, "AP coverage crossed, m");
  cost->add_option("--anchor-period", anchor_period, "anchor spacing in beacons");
  cost->add_option("--k", k_worst, "hash-walk distance of the first verification");
  cost->add_option("--c-sig", table.c_sig_us, "signature verify cost, us");
  cost->add_option("--c-hmac", table.c_hmac_us, "HMAC cost, us");
  cost->add_option("--c-hash", table.c_hash_us, "hash cost, us");
  cost->add_option("--c-cert", table.c_cert_us, "certificate verify cost, us");
  cost->add_flag("--include-cert", include_cert, "count certificate validation");
  cost->add_option("--interval-us", interval_us, "beacon interval, us");

  // ntsim
  auto* ntsim = app.add_subcommand("ntsim", "network-time exchange simulator");
  std::string model_path, preset;
  std::uint32_t count = 1000, forge_every = 0;
  std::string auth_mode = "on";
  std::uint64_t ntsim_seed = 1;
  double load_multiplier = 6.0;
  std::int64_t forge_bias_us = 50'000;
  ntsim->add_option("--model", model_path, "delay model JSON file");
  ntsim->add_option("--preset", preset, "named preset (nts.sth1, nts.sth2, ...)");
  ntsim->add_option("--count", count, "number of exchanges");
  ntsim->add_option("--auth", auth_mode, "on|off")->check(CLI::IsMember({"on", "off"}));
  ntsim->add_option("--seed", ntsim_seed, "RNG seed");
  ntsim->add_option("--load-multiplier", load_multiplier,
                    "relative protocol load of authenticated mode");
  ntsim->add_option("--forge-every", forge_every, "forge every k-th reply (0: never)");
  ntsim->add_option("--forge-bias-us", forge_bias_us, "bias written into forged replies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) {
      const Scenario scenario = load_scenario_file(scenario_path);
      const RunResult result = authtime::run(scenario);
      write_outputs(result, scenario, out_dir);
      std::cout << "wrote " << out_dir << "/{events.csv,frames.csv,windows_w*.csv,summary.txt,"
                << "capture.bin,anchor.bin,cert.bin,root.pub}\n";
      return kExitOk;
    }
    if (gen->parsed())
      return run_chain_gen(seed_hex, gen_length, gen_period, gen_validity_start,
                           gen_validity_end, chain_out);
    if (inspect->parsed()) return run_chain_inspect(chain_in, element_index);
    if (verify->parsed())
      return run_verify(capture_path, anchor_path, cert_path, root_path, margin_us, legacy);
    if (cost->parsed())
      return run_cost(speed_kmh, coverage_m, anchor_period, k_worst, table, include_cert,
                      interval_us);
    if (ntsim->parsed())
      return run_ntsim(model_path, preset, count, auth_mode == "on", ntsim_seed, load_multiplier,
                       forge_every, forge_bias_us);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
