#include "authtime/transmitter.hpp"

#include <cmath>

#include "authtime/errors.hpp"

namespace authtime {

void ApConfig::validate() const {
  if (tbtt_tu < 1) throw InvalidParameter("tbtt_tu must be >= 1");
  if (tu_us < 1) throw InvalidParameter("tu_us must be >= 1");
  if (tsf_ppm < 0) throw InvalidParameter("tsf_ppm must be >= 0");
  if (csma_defer_prob < 0 || csma_defer_prob > 1)
    throw InvalidParameter("csma_defer_prob must be in [0, 1]");
}

std::uint64_t nominal_tbtt(std::uint32_t n, const ApConfig& cfg) {
  if (n < 1) throw InvalidParameter("beacon index starts at 1");
  return static_cast<std::uint64_t>(n) * cfg.interval_us();
}

ApTransmitter::ApTransmitter(ApConfig cfg, std::shared_ptr<const HashChain> chain,
                             ByteView signing_key, ApCertificate certificate,
                             const SignatureScheme& scheme)
    : cfg_(cfg), chain_(std::move(chain)), certificate_(std::move(certificate)) {
  cfg_.validate();
  // Sign every anchor up front, outside the transmission path.
  anchors_.reserve(chain_->length() / chain_->anchor_period() + 1);
  for (std::uint32_t index = 0; index <= chain_->length(); index += chain_->anchor_period()) {
    anchors_.push_back(sign_anchor(*chain_, index, signing_key, cfg_.ap_id, scheme));
  }
}

std::vector<ScheduledBeacon> ApTransmitter::emit_schedule(std::uint32_t count) const {
  if (count > chain_->length() - 1)
    throw ChainExhausted("chain of length " + std::to_string(chain_->length()) +
                         " supports at most " + std::to_string(chain_->length() - 1) +
                         " beacons");
  Rng rng(cfg_.rng_seed);
  const std::uint64_t start = chain_->validity().start_us;
  const double interval_us = static_cast<double>(cfg_.interval_us());
  const double tsf_amplitude_us = cfg_.tsf_ppm * 1e-6 * interval_us;
  // Drift model: one fixed rate for the whole run.
  const double drift_ppm = cfg_.tsf_model == TsfModel::Drift
                               ? rng.uniform(-cfg_.tsf_ppm, cfg_.tsf_ppm)
                               : 0.0;

  std::vector<ScheduledBeacon> schedule;
  schedule.reserve(count);
  for (std::uint32_t n = 1; n <= count; ++n) {
    ScheduledBeacon entry;
    entry.n = n;
    entry.scheduled_us = start + nominal_tbtt(n, cfg_);
    std::uint64_t defer = 0;
    if (cfg_.csma_defer_prob > 0 && rng.uniform() < cfg_.csma_defer_prob) {
      defer = static_cast<std::uint64_t>(rng.uniform(0.0, cfg_.csma_defer_max_us));
    }
    entry.actual_tx_us = entry.scheduled_us + defer;

    double tsf_error_us;
    if (cfg_.tsf_model == TsfModel::Drift) {
      tsf_error_us = drift_ppm * 1e-6 * static_cast<double>(entry.actual_tx_us - start);
    } else {
      tsf_error_us = rng.uniform(-tsf_amplitude_us, tsf_amplitude_us);
    }
    const std::uint64_t stamped =
        static_cast<std::uint64_t>(std::llround(static_cast<double>(entry.actual_tx_us) + tsf_error_us));

    Attachments attachments;
    if (cfg_.anchor_every > 0 && n % cfg_.anchor_every == 0) {
      // Newest anchor point at or below this beacon's index.
      attachments.anchor = anchors_[n / chain_->anchor_period()];
    }
    if (cfg_.cert_every > 0 && n % cfg_.cert_every == 0) {
      attachments.certificate = certificate_;
    }
    entry.frame = build_beacon(*chain_, n, stamped, cfg_.tbtt_tu, cfg_.ap_id, attachments);
    schedule.push_back(std::move(entry));
  }
  return schedule;
}

}  // namespace authtime
