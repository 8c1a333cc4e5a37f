#include "authtime/cost.hpp"

#include <cmath>

#include "authtime/errors.hpp"

namespace authtime {

double first_authentication_cost(std::uint32_t k, bool include_cert, const CostTable& table) {
  double cost = table.c_sig_us + table.c_hmac_us + static_cast<double>(k) * table.c_hash_us;
  if (include_cert) cost += table.c_cert_us;
  return cost;
}

double steady_state_cost(const CostTable& table) { return table.c_hmac_us + table.c_hash_us; }

double lost_beacons_cost(std::uint32_t gap, const CostTable& table) {
  if (gap == 0) throw InvalidParameter("gap must be >= 1");
  return table.c_hmac_us + static_cast<double>(gap) * table.c_hash_us;
}

TransitCostReport transit_cost_report(double speed_kmh, double coverage_m,
                                      std::uint32_t anchor_period_beacons, const CostTable& table,
                                      std::uint32_t k_worst, bool include_cert,
                                      double beacon_interval_us) {
  if (speed_kmh <= 0) throw InvalidParameter("speed must be positive");
  if (coverage_m <= 0) throw InvalidParameter("coverage must be positive");
  if (beacon_interval_us <= 0) throw InvalidParameter("beacon interval must be positive");
  if (anchor_period_beacons > 0 && k_worst >= anchor_period_beacons)
    throw InvalidParameter("k_worst must be below the anchor period");

  TransitCostReport report;
  const double speed_mps = speed_kmh / 3.6;
  report.transit_s = coverage_m / speed_mps;
  report.beacons =
      static_cast<std::uint64_t>(std::floor(report.transit_s * 1e6 / beacon_interval_us));
  if (report.beacons == 0) {
    report.total_auth_us = 0;
    report.fraction = 0;
    return report;
  }
  report.total_auth_us = first_authentication_cost(k_worst, include_cert, table) +
                         static_cast<double>(report.beacons - 1) * steady_state_cost(table);
  report.fraction = report.total_auth_us * 1e-6 / report.transit_s;
  return report;
}

}  // namespace authtime
