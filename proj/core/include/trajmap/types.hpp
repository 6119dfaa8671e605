#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajmap/errors.hpp"

namespace trajmap {

struct WayPoint {
  std::string journey_id;
  std::int64_t t_ms = 0;                 // epoch milliseconds
  double lat = 0.0;                      // degrees WGS84
  double lon = 0.0;                      // degrees WGS84
  std::optional<double> speed_mps;       // instantaneous speed, if recorded

  bool valid() const {
    if (!(lat >= -90.0 && lat <= 90.0)) return false;
    if (!(lon >= -180.0 && lon <= 180.0)) return false;
    if (speed_mps && !(std::isfinite(*speed_mps) && *speed_mps >= 0.0))
      return false;
    return true;
  }
};

// Ordered polyline of one vehicle trip. Timestamps strictly increase and
// size() >= 2 once built; see build_journeys().
struct Journey {
  std::string id;
  std::vector<WayPoint> points;
};

enum class Label : std::uint8_t { intersection = 0, straight = 1 };

inline const char* to_string(Label l) {
  return l == Label::intersection ? "intersection" : "straight";
}

inline Label parse_label(const std::string& s) {
  if (s == "intersection") return Label::intersection;
  if (s == "straight") return Label::straight;
  throw DataError("unknown label: '" + s + "'");
}

// A classifier verdict. score is the probability assigned to the
// intersection class; label must agree with the decision threshold used.
struct Prediction {
  Label label = Label::straight;
  double score = 0.0;
};

}  // namespace trajmap
