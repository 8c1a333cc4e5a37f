#pragma once

#include <cstdint>

namespace authtime {

// Per-operation receiver-side delays in microseconds. Defaults are the
// measured values for an Intel i7-class CPU; configurable so the arithmetic
// holds for any primitive set.
struct CostTable {
  double c_sig_us = 52.0;
  double c_hmac_us = 7.67;
  double c_hash_us = 1.64;
  double c_cert_us = 52.0;
};

// Cost of the first beacon authentication after joining an AP's coverage:
// one signature verification, one HMAC, and a hash walk of length k back to
// the most recent signed anchor (plus certificate validation if needed).
double first_authentication_cost(std::uint32_t k, bool include_cert, const CostTable& table);

// Cost of each subsequent authentication: one HMAC plus one hash.
double steady_state_cost(const CostTable& table);

// Subsequent authentication after losing (gap - 1) beacons: one HMAC plus a
// gap-length hash walk. Throws InvalidParameter when gap == 0.
double lost_beacons_cost(std::uint32_t gap, const CostTable& table);

struct TransitCostReport {
  double transit_s = 0;       // time spent inside the coverage area
  std::uint64_t beacons = 0;  // beacons receivable during the transit
  double total_auth_us = 0;   // first authentication + steady-state rest
  double fraction = 0;        // total_auth vs transit time, as a ratio
};

// Closed-form cost of authenticating every beacon heard while crossing one
// AP's coverage area. Throws InvalidParameter on non-positive speed,
// coverage, or interval, or when k_worst is not below the anchor period.
TransitCostReport transit_cost_report(double speed_kmh, double coverage_m,
                                      std::uint32_t anchor_period_beacons, const CostTable& table,
                                      std::uint32_t k_worst, bool include_cert = false,
                                      double beacon_interval_us = 102400.0);

}  // namespace authtime
