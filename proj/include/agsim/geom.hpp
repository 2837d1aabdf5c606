#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace agsim {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

inline bool is_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

// Closed axis-aligned box. min <= max componentwise.
struct Box {
  Point3 min;
  Point3 max;

  bool valid() const {
    return is_finite(min) && is_finite(max) && min.x <= max.x &&
           min.y <= max.y && min.z <= max.z;
  }

  bool contains(const Point3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }
};

struct LosResult {
  bool clear = true;
  std::vector<int> blockers;  // ascending building indices
};

inline double distance(const Point3& a, const Point3& b) {
  return std::hypot(b.x - a.x, b.y - a.y, b.z - a.z);
}

// Slab-clipping segment/box test over the closed segment [a, b] and the
// closed box. Boundary contact counts as intersection: a segment lying in
// a face plane of the box intersects it. Comparisons are exact; there is
// no tolerance inflation here (tolerant checks belong to the oracles that
// validate this predicate, not to the predicate itself).
inline bool segment_intersects_box(const Point3& a, const Point3& b,
                                   const Box& box) {
  double t_enter = 0.0;
  double t_exit = 1.0;

  const double origin[3] = {a.x, a.y, a.z};
  const double delta[3] = {b.x - a.x, b.y - a.y, b.z - a.z};
  const double lo[3] = {box.min.x, box.min.y, box.min.z};
  const double hi[3] = {box.max.x, box.max.y, box.max.z};

  for (int axis = 0; axis < 3; ++axis) {
    if (delta[axis] == 0.0) {
      // Segment parallel to this slab: inside-or-on-boundary or miss.
      if (origin[axis] < lo[axis] || origin[axis] > hi[axis]) return false;
      continue;
    }
    double t_lo = (lo[axis] - origin[axis]) / delta[axis];
    double t_hi = (hi[axis] - origin[axis]) / delta[axis];
    if (t_lo > t_hi) std::swap(t_lo, t_hi);
    if (t_lo > t_enter) t_enter = t_lo;
    if (t_hi < t_exit) t_exit = t_hi;
    if (t_enter > t_exit) return false;
  }
  return true;
}

// Classifies the straight path a->b against a building set. Each building
// is tested independently (overlapping buildings each contribute), so the
// blocker count can feed per-building penetration loss.
inline LosResult line_of_sight(const Point3& a, const Point3& b,
                               std::span<const Box> buildings) {
  LosResult result;
  for (int i = 0; i < static_cast<int>(buildings.size()); ++i) {
    if (segment_intersects_box(a, b, buildings[i])) {
      result.blockers.push_back(i);
    }
  }
  result.clear = result.blockers.empty();
  return result;
}

}  // namespace agsim
