#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "agsim/geom.hpp"
#include "agsim/rng.hpp"

namespace agsim {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Radio parameters of the air-to-ground link. The PHY rate is constant
// (no rate adaptation).
struct RadioConfig {
  double frequency_hz = 5e9;
  double tx_power_dbm = 20.0;
  double antenna_gain_tx_dbi = 0.0;
  double antenna_gain_rx_dbi = 0.0;
  double channel_width_hz = 80e6;
  double noise_figure_db = 7.0;
  double phy_rate_bps = 150e6;
};

// Obstructed-path loss model: free-space loss plus a fixed penetration
// loss per wall crossed (walls_per_building per traversed building, entry
// and exit by default) plus log-normal shadowing. Shadowing sigma switches
// on the LoS/non-LoS state of the path.
struct ObstacleLossParams {
  double wall_loss_db = 7.0;
  int walls_per_building = 2;
  double shadowing_sigma_los_db = 0.0;
  double shadowing_sigma_nlos_db = 7.0;
};

struct LinkBudget {
  double path_loss_db = 0.0;   // deterministic part: free-space + walls
  double shadowing_db = 0.0;   // signed sample, positive = extra loss
  double rx_power_dbm = 0.0;
  double noise_dbm = 0.0;
  double snr_db = 0.0;
};

// Free-space path loss, PL = 20*log10(4*pi*d*f/c).
inline double friis_path_loss_db(double distance_m, double frequency_hz) {
  if (!(distance_m > 0.0))
    throw std::domain_error("friis_path_loss_db: distance must be > 0");
  if (!(frequency_hz > 0.0))
    throw std::domain_error("friis_path_loss_db: frequency must be > 0");
  return 20.0 *
         std::log10(4.0 * M_PI * distance_m * frequency_hz / kSpeedOfLight);
}

// Thermal noise floor: -174 dBm/Hz + 10*log10(B) + NF.
inline double noise_floor_dbm(double width_hz, double noise_figure_db) {
  if (!(width_hz > 0.0))
    throw std::domain_error("noise_floor_dbm: bandwidth must be > 0");
  return -174.0 + 10.0 * std::log10(width_hz) + noise_figure_db;
}

// One log-normal shadowing sample in the dB domain.
inline double sample_shadowing_db(RngStream& stream, double sigma_db) {
  if (!(sigma_db >= 0.0))
    throw std::domain_error("sample_shadowing_db: sigma must be >= 0");
  return stream.next_gaussian(sigma_db);
}

inline double penetration_loss_db(const LosResult& los,
                                  const ObstacleLossParams& params) {
  if (los.clear) return 0.0;
  return static_cast<double>(los.blockers.size()) *
         static_cast<double>(params.walls_per_building) * params.wall_loss_db;
}

// Total path loss with a caller-supplied shadowing sample. The caller is
// responsible for drawing the sample with the sigma that matches the
// LoS state (see link_budget).
inline double obstacle_aware_path_loss_db(const Point3& a, const Point3& b,
                                          std::span<const Box> buildings,
                                          double frequency_hz,
                                          const ObstacleLossParams& params,
                                          double shadow_db) {
  const double base = friis_path_loss_db(distance(a, b), frequency_hz);
  const LosResult los = line_of_sight(a, b, buildings);
  return base + penetration_loss_db(los, params) + shadow_db;
}

// Full link budget for one path. Draws one shadowing sample from the
// stream (sigma chosen by LoS state), so call it once per run per link
// for a quasi-static channel.
inline LinkBudget link_budget(const Point3& a, const Point3& b,
                              std::span<const Box> buildings,
                              const RadioConfig& radio,
                              const ObstacleLossParams& params,
                              RngStream& stream) {
  const LosResult los = line_of_sight(a, b, buildings);
  const double sigma = los.clear ? params.shadowing_sigma_los_db
                                 : params.shadowing_sigma_nlos_db;

  LinkBudget budget;
  budget.shadowing_db = sample_shadowing_db(stream, sigma);
  budget.path_loss_db = friis_path_loss_db(distance(a, b), radio.frequency_hz) +
                        penetration_loss_db(los, params);
  budget.rx_power_dbm = radio.tx_power_dbm + radio.antenna_gain_tx_dbi +
                        radio.antenna_gain_rx_dbi - budget.path_loss_db -
                        budget.shadowing_db;
  budget.noise_dbm =
      noise_floor_dbm(radio.channel_width_hz, radio.noise_figure_db);
  budget.snr_db = budget.rx_power_dbm - budget.noise_dbm;
  return budget;
}

}  // namespace agsim
