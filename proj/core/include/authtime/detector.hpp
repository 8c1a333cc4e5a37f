#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace authtime {

enum class ReferenceMode { BeaconsOnly, TimeServerOnly, Fused };

const char* to_string(ReferenceMode mode);
ReferenceMode reference_mode_from_string(const std::string& name);  // throws ConfigError

struct DetectionConfig {
  double window_s = 1.0;
  double epsilon_us = 25.5;
  std::uint32_t min_observations_per_window = 5;
  ReferenceMode reference = ReferenceMode::BeaconsOnly;
  // Alarm on the window maximum instead of the window mean.
  bool max_rule = false;

  void validate() const;  // throws InvalidParameter
};

// Client-side views of the three time feeds. All are stamped with the local
// clock reading at the reception instant.
struct GnssObservation {
  std::uint64_t local_rx_us = 0;
  std::uint64_t reported_time_us = 0;
};
struct BeaconTimeObservation {
  std::uint64_t local_rx_us = 0;
  std::uint64_t beacon_timestamp_us = 0;
};
struct ServerTimeObservation {
  std::uint64_t local_rx_us = 0;
  double offset_s = 0;  // estimator output for this exchange
};

struct WindowStat {
  double window_start_s = 0;
  double mean_residual_us = 0;
  double std_residual_us = 0;
  std::uint32_t n_obs = 0;
  bool alarm = false;
};

struct DetectionReport {
  std::vector<WindowStat> windows;
  std::optional<std::uint64_t> first_alarm_time_us;  // end of the first alarmed window
  std::optional<std::int64_t> time_to_detect_us;     // first_alarm - ramp_start
  std::uint32_t false_alarm_count = 0;               // alarms before ramp_start
};

// ramp_start value for attack-free runs: every alarm counts as false and no
// time-to-detect is reported.
inline constexpr std::uint64_t kNoRampStart = UINT64_MAX;

// Sample standard deviation of attack-free residuals; the detection threshold
// of the deployed system. Throws InsufficientData below 100 observations.
double calibrate_epsilon(std::span<const double> residuals_us);

// Residual of one beacon observation: GNSS-derived time at the reception
// instant minus the beacon-derived expected time. GNSS time is propagated
// from the most recent PVT sample using elapsed local clock time.
std::vector<double> beacon_residuals_us(std::span<const GnssObservation> gnss,
                                        std::span<const BeaconTimeObservation> beacons,
                                        std::vector<std::uint64_t>* residual_times_us = nullptr);

// Windowed cross-validation of the GNSS feed against the authenticated
// references. Observations must be sorted by local time.
DetectionReport run_detection(std::span<const GnssObservation> gnss,
                              std::span<const BeaconTimeObservation> beacons,
                              std::span<const ServerTimeObservation> server_offsets,
                              const DetectionConfig& cfg, std::uint64_t ramp_start_us);

}  // namespace authtime
