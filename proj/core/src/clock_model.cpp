#include "authtime/clock_model.hpp"

#include <cmath>

#include "authtime/rng.hpp"

namespace authtime {

std::uint64_t ClockModel::read(std::uint64_t true_time_us) const {
  double reading = static_cast<double>(true_time_us) + static_cast<double>(offset_us) +
                   drift_ppm * 1e-6 * static_cast<double>(true_time_us);
  if (noise_std_us > 0) {
    // Noise keyed on (seed, t) so repeated reads at the same instant agree.
    std::uint64_t s = rng_seed ^ (true_time_us * 0x9e3779b97f4a7c15ULL);
    Rng rng(splitmix64(s));
    reading += rng.normal(0.0, noise_std_us);
  }
  if (reading < 0) reading = 0;
  return static_cast<std::uint64_t>(std::llround(reading));
}

std::int64_t gnss_bias_us(const GnssAttackProfile& profile, std::uint64_t t_us) {
  if (t_us <= profile.ramp_start_us || profile.max_bias_us == 0) return 0;
  const double elapsed_s = static_cast<double>(t_us - profile.ramp_start_us) * 1e-6;
  const double direction = profile.max_bias_us < 0 ? -1.0 : 1.0;
  double bias = direction * std::abs(profile.ramp_rate_us_per_s) * elapsed_s;
  const double cap = static_cast<double>(profile.max_bias_us);
  if (profile.hold_after_max) {
    if (direction > 0 && bias > cap) bias = cap;
    if (direction < 0 && bias < cap) bias = cap;
  }
  return static_cast<std::int64_t>(std::llround(bias));
}

GnssSample sample_gnss(const GnssAttackProfile& profile, std::uint64_t t_us,
                       std::uint32_t epoch_index) {
  GnssSample sample;
  sample.true_time_us = t_us;
  sample.reported_time_us =
      static_cast<std::uint64_t>(static_cast<std::int64_t>(t_us) + gnss_bias_us(profile, t_us));
  sample.pvt_epoch_index = epoch_index;
  return sample;
}

}  // namespace authtime
