#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "authtime/bytes.hpp"
#include "authtime/clock_model.hpp"
#include "authtime/rng.hpp"
#include "authtime/trust.hpp"

namespace authtime {

// Network path model for one time server. One-way delays are derived so the
// measured round-trip delay and offset error reproduce the configured
// moments: RTD ~ N(rtd_mean, rtd_std) truncated at 1 ms, and a path
// asymmetry ~ N(offset_mean, offset_std) splits it across the two directions.
struct DelayModel {
  double rtd_mean_s = 0.02765;
  double rtd_std_s = 0.007151;
  double offset_mean_s = 0.000938;
  double offset_std_s = 0.003309;
  std::uint64_t rng_seed = 1;

  void validate() const;  // throws InvalidParameter
};

// Four-timestamp client/server transaction. The authentication tag covers the
// server timestamps plus the client's nonce.
struct TimeExchange {
  std::uint64_t t1 = 0;  // client send (client clock)
  std::uint64_t t2 = 0;  // server receive (server clock)
  std::uint64_t t3 = 0;  // server send (server clock)
  std::uint64_t t4 = 0;  // client receive (client clock)
  std::array<std::uint8_t, 16> nonce{};
  std::optional<Digest32> auth_tag;
  std::string server_id;
};

struct SessionKeys {
  Digest32 client_to_server{};
  Digest32 server_to_client{};
  std::uint64_t established_at_us = 0;
};

struct OffsetRtd {
  double offset_s = 0;  // amount to add to the client clock
  double rtd_s = 0;
};

// Standard four-timestamp estimator:
//   offset = ((t2 - t1) + (t3 - t4)) / 2,  rtd = (t4 - t1) - (t3 - t2).
OffsetRtd compute_offset_rtd(const TimeExchange& exchange);

Digest32 exchange_auth_tag(const TimeExchange& exchange, const SessionKeys& keys);
bool verify_exchange_auth(const TimeExchange& exchange, const SessionKeys& keys);

// Work accounting for the exchanges, including the relative protocol load of
// the authenticated mode versus the plain one.
struct NetTimeCounters {
  std::uint64_t exchanges = 0;
  std::uint64_t authenticated_exchanges = 0;
  std::uint64_t key_establishments = 0;
  std::uint64_t hmacs_generated = 0;
  std::uint64_t hmacs_verified = 0;
  double load_units = 0;  // 1 per plain exchange, multiplier per authenticated
};

// Simulated remote time server plus the network path to it.
class TimeServerSim {
 public:
  TimeServerSim(std::string server_id, DelayModel model, double auth_load_multiplier = 6.0);

  const std::string& server_id() const { return server_id_; }
  const NetTimeCounters& counters() const { return counters_; }

  // Fresh random session keys; throws UnknownServer unless the id is in the
  // trust store.
  SessionKeys establish_session(const TrustStore& store, std::uint64_t now_us);

  // One four-timestamp transaction starting at true time `true_time_us`.
  // Produces an authenticated reply iff `keys` is non-null.
  TimeExchange exchange(std::uint64_t true_time_us, const ClockModel& client_clock,
                        const ClockModel& server_clock, const SessionKeys* keys);

 private:
  std::string server_id_;
  DelayModel model_;
  double auth_load_multiplier_;
  Rng rng_;
  NetTimeCounters counters_;
};

}  // namespace authtime
