#pragma once

#include <cmath>
#include <stdexcept>

#include "agsim/rng.hpp"

namespace agsim {

// Logistic SNR -> packet-error-rate curve standing in for a per-modulation
// error model: PER = 1 / (1 + exp((snr - snr_mid) / steepness)).
struct ErrorModelParams {
  double snr_mid_db = 12.0;   // 50%-PER point
  double steepness_db = 1.5;  // logistic width
  int max_retries = 7;        // MAC retries after the first attempt
};

struct TxOutcome {
  int attempts = 0;
  bool delivered = false;
  double airtime_s = 0.0;  // all attempts, overhead included
};

inline double packet_error_rate(double snr_db, const ErrorModelParams& params) {
  if (!(params.steepness_db > 0.0))
    throw std::domain_error("packet_error_rate: steepness must be > 0");
  return 1.0 / (1.0 + std::exp((snr_db - params.snr_mid_db) /
                               params.steepness_db));
}

// Air occupancy of one transmission attempt. The overhead term lumps
// framing and ack turnaround into a single per-attempt constant.
inline double airtime_s(long payload_bytes, double phy_rate_bps,
                        double per_attempt_overhead_s) {
  if (payload_bytes <= 0)
    throw std::domain_error("airtime_s: payload must be > 0 bytes");
  if (!(phy_rate_bps > 0.0))
    throw std::domain_error("airtime_s: phy rate must be > 0");
  if (!(per_attempt_overhead_s >= 0.0))
    throw std::domain_error("airtime_s: overhead must be >= 0");
  return per_attempt_overhead_s +
         8.0 * static_cast<double>(payload_bytes) / phy_rate_bps;
}

// MAC retry loop: independent Bernoulli(PER) failure per attempt, stop on
// first success or after max_retries + 1 attempts. Consumes one uniform
// per attempt from the stream.
inline TxOutcome transmit(long packet_bytes, double snr_db,
                          const ErrorModelParams& params, double phy_rate_bps,
                          double per_attempt_overhead_s, RngStream& stream) {
  if (params.max_retries < 0)
    throw std::domain_error("transmit: max_retries must be >= 0");
  const double per = packet_error_rate(snr_db, params);
  const double per_attempt =
      airtime_s(packet_bytes, phy_rate_bps, per_attempt_overhead_s);

  TxOutcome outcome;
  const int max_attempts = params.max_retries + 1;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    outcome.attempts = attempt;
    if (stream.next_unit() >= per) {
      outcome.delivered = true;
      break;
    }
  }
  outcome.airtime_s = outcome.attempts * per_attempt;
  return outcome;
}

}  // namespace agsim
