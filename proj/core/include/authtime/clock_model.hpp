#pragma once

#include <cstdint>

namespace authtime {

// Local oscillator model. A reading at true time t is
//   t + offset + drift_ppm * 1e-6 * t + Gaussian(0, noise_std).
// Readings are pure functions of (seed, t) so any reading is reproducible.
struct ClockModel {
  std::int64_t offset_us = 0;
  double drift_ppm = 0.0;
  double noise_std_us = 0.0;
  std::uint64_t rng_seed = 0;

  std::uint64_t read(std::uint64_t true_time_us) const;
};

// Adversarial bias on the reported GNSS time: zero before ramp_start, then a
// linear ramp toward max_bias_us, held constant once reached.
struct GnssAttackProfile {
  std::uint64_t ramp_start_us = 0;
  double ramp_rate_us_per_s = 5000.0;
  std::int64_t max_bias_us = 120'000;
  bool hold_after_max = true;
};

std::int64_t gnss_bias_us(const GnssAttackProfile& profile, std::uint64_t t_us);

// One PVT epoch of the receiver's time solution (1 Hz in the simulations).
struct GnssSample {
  std::uint64_t true_time_us = 0;
  std::uint64_t reported_time_us = 0;
  std::uint32_t pvt_epoch_index = 0;
};

GnssSample sample_gnss(const GnssAttackProfile& profile, std::uint64_t t_us,
                       std::uint32_t epoch_index);

}  // namespace authtime
