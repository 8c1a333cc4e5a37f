#include "authtime/detector.hpp"

#include <algorithm>
#include <cmath>

#include "authtime/errors.hpp"

namespace authtime {

const char* to_string(ReferenceMode mode) {
  switch (mode) {
    case ReferenceMode::BeaconsOnly: return "beacons_only";
    case ReferenceMode::TimeServerOnly: return "time_server_only";
    case ReferenceMode::Fused: return "fused";
  }
  return "unknown";
}

ReferenceMode reference_mode_from_string(const std::string& name) {
  if (name == "beacons_only") return ReferenceMode::BeaconsOnly;
  if (name == "time_server_only") return ReferenceMode::TimeServerOnly;
  if (name == "fused") return ReferenceMode::Fused;
  throw ConfigError("detection.reference", "unknown reference mode: " + name);
}

void DetectionConfig::validate() const {
  if (window_s <= 0) throw InvalidParameter("window_s must be positive");
  if (epsilon_us <= 0) throw InvalidParameter("epsilon_us must be positive");
}

namespace {

struct MeanStd {
  double mean = 0;
  double stddev = 0;
};

MeanStd mean_std(std::span<const double> values) {
  MeanStd result;
  if (values.empty()) return result;
  double sum = 0;
  for (double v : values) sum += v;
  result.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return result;
  double sq = 0;
  for (double v : values) sq += (v - result.mean) * (v - result.mean);
  result.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  return result;
}

// GNSS time propagated to `local_at_us` from the newest sample at or before
// it, using elapsed local time.
std::optional<double> gnss_time_at(std::span<const GnssObservation> gnss,
                                   std::uint64_t local_at_us) {
  auto it = std::upper_bound(gnss.begin(), gnss.end(), local_at_us,
                             [](std::uint64_t t, const GnssObservation& g) {
                               return t < g.local_rx_us;
                             });
  if (it == gnss.begin()) return std::nullopt;
  const GnssObservation& g = *(it - 1);
  return static_cast<double>(g.reported_time_us) +
         (static_cast<double>(local_at_us) - static_cast<double>(g.local_rx_us));
}

std::optional<double> server_offset_at(std::span<const ServerTimeObservation> offsets,
                                       std::uint64_t local_at_us) {
  auto it = std::upper_bound(offsets.begin(), offsets.end(), local_at_us,
                             [](std::uint64_t t, const ServerTimeObservation& s) {
                               return t < s.local_rx_us;
                             });
  if (it == offsets.begin()) return std::nullopt;
  return (it - 1)->offset_s;
}

}  // namespace

double calibrate_epsilon(std::span<const double> residuals_us) {
  if (residuals_us.size() < 100)
    throw InsufficientData("calibration needs >= 100 observations, got " +
                           std::to_string(residuals_us.size()));
  return mean_std(residuals_us).stddev;
}

std::vector<double> beacon_residuals_us(std::span<const GnssObservation> gnss,
                                        std::span<const BeaconTimeObservation> beacons,
                                        std::vector<std::uint64_t>* residual_times_us) {
  std::vector<double> residuals;
  residuals.reserve(beacons.size());
  if (residual_times_us) residual_times_us->reserve(beacons.size());
  for (const auto& beacon : beacons) {
    auto gnss_time = gnss_time_at(gnss, beacon.local_rx_us);
    if (!gnss_time) continue;  // no PVT fix yet
    residuals.push_back(*gnss_time - static_cast<double>(beacon.beacon_timestamp_us));
    if (residual_times_us) residual_times_us->push_back(beacon.local_rx_us);
  }
  return residuals;
}

DetectionReport run_detection(std::span<const GnssObservation> gnss,
                              std::span<const BeaconTimeObservation> beacons,
                              std::span<const ServerTimeObservation> server_offsets,
                              const DetectionConfig& cfg, std::uint64_t ramp_start_us) {
  cfg.validate();

  // Residual stream for the configured reference.
  std::vector<std::uint64_t> times;
  std::vector<double> residuals;
  if (cfg.reference == ReferenceMode::BeaconsOnly || cfg.reference == ReferenceMode::Fused) {
    residuals = beacon_residuals_us(gnss, beacons, &times);
  }
  if (cfg.reference == ReferenceMode::TimeServerOnly || cfg.reference == ReferenceMode::Fused) {
    for (const auto& g : gnss) {
      auto offset = server_offset_at(server_offsets, g.local_rx_us);
      if (!offset) continue;
      const double reference_us = static_cast<double>(g.local_rx_us) + *offset * 1e6;
      times.push_back(g.local_rx_us);
      residuals.push_back(static_cast<double>(g.reported_time_us) - reference_us);
    }
    if (cfg.reference == ReferenceMode::Fused) {
      // Merge the two streams into time order.
      std::vector<std::size_t> order(times.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
      std::vector<std::uint64_t> sorted_times(times.size());
      std::vector<double> sorted_residuals(times.size());
      for (std::size_t i = 0; i < order.size(); ++i) {
        sorted_times[i] = times[order[i]];
        sorted_residuals[i] = residuals[order[i]];
      }
      times = std::move(sorted_times);
      residuals = std::move(sorted_residuals);
    }
  }

  DetectionReport report;
  if (times.empty()) return report;

  const double window_us = cfg.window_s * 1e6;
  const std::uint64_t last_window =
      static_cast<std::uint64_t>(static_cast<double>(times.back()) / window_us);

  std::size_t cursor = 0;
  for (std::uint64_t w = 0; w <= last_window; ++w) {
    const double start_us = static_cast<double>(w) * window_us;
    const double end_us = start_us + window_us;
    std::vector<double> in_window;
    while (cursor < times.size() && static_cast<double>(times[cursor]) < end_us) {
      in_window.push_back(residuals[cursor]);
      ++cursor;
    }
    WindowStat stat;
    stat.window_start_s = start_us * 1e-6;
    stat.n_obs = static_cast<std::uint32_t>(in_window.size());
    MeanStd ms = mean_std(in_window);
    stat.mean_residual_us = ms.mean;
    stat.std_residual_us = ms.stddev;
    double statistic = std::abs(ms.mean);
    if (cfg.max_rule) {
      statistic = 0;
      for (double r : in_window) statistic = std::max(statistic, std::abs(r));
    }
    stat.alarm = stat.n_obs >= cfg.min_observations_per_window && statistic > cfg.epsilon_us;
    if (stat.alarm) {
      const std::uint64_t window_end = static_cast<std::uint64_t>(end_us);
      if (!report.first_alarm_time_us) {
        report.first_alarm_time_us = window_end;
        if (ramp_start_us != kNoRampStart) {
          report.time_to_detect_us = static_cast<std::int64_t>(window_end) -
                                     static_cast<std::int64_t>(ramp_start_us);
        }
      }
      if (window_end <= ramp_start_us) ++report.false_alarm_count;
    }
    report.windows.push_back(stat);
  }
  return report;
}

}  // namespace authtime
