#include "authtime/net_time.hpp"

#include <algorithm>
#include <cmath>

#include "authtime/crypto.hpp"
#include "authtime/errors.hpp"

namespace authtime {

void DelayModel::validate() const {
  if (rtd_std_s < 0 || offset_std_s < 0) throw InvalidParameter("delay stddev must be >= 0");
  if (rtd_mean_s < 0) throw InvalidParameter("rtd mean must be >= 0");
}

OffsetRtd compute_offset_rtd(const TimeExchange& x) {
  const double t1 = static_cast<double>(x.t1);
  const double t2 = static_cast<double>(x.t2);
  const double t3 = static_cast<double>(x.t3);
  const double t4 = static_cast<double>(x.t4);
  OffsetRtd result;
  result.offset_s = ((t2 - t1) + (t3 - t4)) / 2.0 * 1e-6;
  result.rtd_s = ((t4 - t1) - (t3 - t2)) * 1e-6;
  return result;
}

Digest32 exchange_auth_tag(const TimeExchange& x, const SessionKeys& keys) {
  Bytes message;
  put_u64(message, x.t2);
  put_u64(message, x.t3);
  put_bytes(message, x.nonce);
  return hmac_sha256(keys.server_to_client, message);
}

bool verify_exchange_auth(const TimeExchange& x, const SessionKeys& keys) {
  if (!x.auth_tag) return false;
  return *x.auth_tag == exchange_auth_tag(x, keys);
}

TimeServerSim::TimeServerSim(std::string server_id, DelayModel model, double auth_load_multiplier)
    : server_id_(std::move(server_id)),
      model_(model),
      auth_load_multiplier_(auth_load_multiplier),
      rng_(model.rng_seed) {
  model_.validate();
  if (auth_load_multiplier_ < 1) throw InvalidParameter("load multiplier must be >= 1");
}

SessionKeys TimeServerSim::establish_session(const TrustStore& store, std::uint64_t now_us) {
  if (!store.knows_time_server(server_id_))
    throw UnknownServer("time server not in trust store: " + server_id_);
  SessionKeys keys;
  keys.client_to_server = rng_.random_bytes32();
  keys.server_to_client = rng_.random_bytes32();
  keys.established_at_us = now_us;
  ++counters_.key_establishments;
  return keys;
}

TimeExchange TimeServerSim::exchange(std::uint64_t true_time_us, const ClockModel& client_clock,
                                     const ClockModel& server_clock, const SessionKeys* keys) {
  // Sampled path: round trip split into two one-way delays whose asymmetry
  // carries the configured offset error.
  double rtd_s = rng_.normal(model_.rtd_mean_s, model_.rtd_std_s);
  rtd_s = std::max(rtd_s, 0.001);
  const double asym_s = rng_.normal(model_.offset_mean_s, model_.offset_std_s);
  const double owd_out_s = std::max(0.0, rtd_s / 2.0 + asym_s);
  const double owd_back_s = std::max(0.0, rtd_s / 2.0 - asym_s);

  const std::uint64_t server_rx_true =
      true_time_us + static_cast<std::uint64_t>(std::llround(owd_out_s * 1e6));
  const std::uint64_t client_rx_true =
      server_rx_true + static_cast<std::uint64_t>(std::llround(owd_back_s * 1e6));

  TimeExchange x;
  x.server_id = server_id_;
  x.t1 = client_clock.read(true_time_us);
  x.t2 = server_clock.read(server_rx_true);
  x.t3 = x.t2;  // instantaneous server turnaround
  x.t4 = client_clock.read(client_rx_true);
  rng_.fill(x.nonce);

  ++counters_.exchanges;
  if (keys != nullptr) {
    x.auth_tag = exchange_auth_tag(x, *keys);
    ++counters_.authenticated_exchanges;
    ++counters_.hmacs_generated;  // server side
    ++counters_.hmacs_verified;   // client side
    counters_.load_units += auth_load_multiplier_;
  } else {
    counters_.load_units += 1.0;
  }
  return x;
}

}  // namespace authtime
