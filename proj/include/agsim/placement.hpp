#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "agsim/channel.hpp"
#include "agsim/errors.hpp"
#include "agsim/geom.hpp"
#include "agsim/simcore.hpp"

namespace agsim {

// Candidate UAV positions: the grid {bounds.min + k*grid_step} along each
// axis, intersected with the [altitude_min, altitude_max] band on z.
// Axis values are generated as lo + k*step (never by repeated addition)
// and a point is kept while lo + k*step <= hi + step*1e-9, so the upper
// boundary survives floating-point drift.
struct SearchRegion {
  Box bounds{{-50.0, -50.0, 10.0}, {50.0, 50.0, 10.0}};
  double grid_step = 1.0;
  double altitude_min = 10.0;
  double altitude_max = 10.0;
};

struct PlacementResult {
  Point3 position;
  double predicted_path_loss_db = 0.0;
  bool los_clear = false;
  long candidates_evaluated = 0;
};

namespace detail {

inline std::vector<double> axis_values(double lo, double hi, double step) {
  std::vector<double> values;
  if (!(step > 0.0)) return values;
  const double limit = hi + step * 1e-9;
  for (long k = 0;; ++k) {
    const double v = lo + static_cast<double>(k) * step;
    if (v > limit) break;
    values.push_back(v);
  }
  return values;
}

// Strict weak order on candidates: LoS-clear first, then lower predicted
// loss, then lexicographically smallest (x, y, z). Any enumeration order
// of the grid yields the same argmin.
inline bool candidate_better(bool clear_a, double loss_a, const Point3& a,
                             bool clear_b, double loss_b, const Point3& b) {
  if (clear_a != clear_b) return clear_a;
  if (loss_a != loss_b) return loss_a < loss_b;
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

}  // namespace detail

// Exhaustive grid search for the UAV position minimizing expected path
// loss (shadowing at its mean, 0 dB). LoS-clear candidates are preferred
// as a hard filter; only if no candidate is clear does the search fall
// back to ranking obstructed ones. Grid points coincident with the user
// are skipped. Throws ConfigError when the grid is empty.
inline PlacementResult find_position(const Point3& ue,
                                     std::span<const Box> buildings,
                                     const SearchRegion& region,
                                     const RadioConfig& radio,
                                     const ObstacleLossParams& params) {
  if (!(region.grid_step > 0.0))
    throw ConfigError("placement: grid_step must be > 0");
  if (!region.bounds.valid())
    throw ConfigError("placement: search bounds are not a valid box");

  const auto xs =
      detail::axis_values(region.bounds.min.x, region.bounds.max.x,
                          region.grid_step);
  const auto ys =
      detail::axis_values(region.bounds.min.y, region.bounds.max.y,
                          region.grid_step);
  const double z_lo = std::max(region.bounds.min.z, region.altitude_min);
  const double z_hi = std::min(region.bounds.max.z, region.altitude_max);
  const auto zs = detail::axis_values(z_lo, z_hi, region.grid_step);

  PlacementResult best;
  bool have_best = false;
  long evaluated = 0;
  for (double x : xs) {
    for (double y : ys) {
      for (double z : zs) {
        const Point3 cand{x, y, z};
        const double d = distance(ue, cand);
        if (d == 0.0) continue;
        ++evaluated;
        const LosResult los = line_of_sight(ue, cand, buildings);
        const double loss = friis_path_loss_db(d, radio.frequency_hz) +
                            penetration_loss_db(los, params);
        if (!have_best ||
            detail::candidate_better(los.clear, loss, cand, best.los_clear,
                                     best.predicted_path_loss_db,
                                     best.position)) {
          best.position = cand;
          best.predicted_path_loss_db = loss;
          best.los_clear = los.clear;
          have_best = true;
        }
      }
    }
  }
  if (!have_best)
    throw ConfigError("placement: search region contains no usable grid point");
  best.candidates_evaluated = evaluated;
  return best;
}

struct RepositionResult {
  BatchResult before;
  BatchResult after;
  PlacementResult placement;
  bool was_clear_before = false;
};

// Measure at the scenario's current UAV position, search for a better one,
// measure again there.
inline RepositionResult reposition_experiment(
    const Scenario& scenario, const SearchRegion& region,
    std::span<const std::uint64_t> seeds) {
  RepositionResult result;
  result.was_clear_before =
      line_of_sight(scenario.ue_pos, scenario.uav_pos, scenario.buildings)
          .clear;
  result.before = run_batch(scenario, seeds);
  result.placement =
      find_position(scenario.ue_pos, scenario.buildings, region,
                    scenario.radio, scenario.obstacle_params);
  Scenario moved = scenario;
  moved.uav_pos = result.placement.position;
  result.after = run_batch(moved, seeds);
  return result;
}

}  // namespace agsim
