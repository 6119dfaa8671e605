#pragma once

#include <string>
#include <utility>

#include "trajmap/geo.hpp"

namespace trajmap::geohash {

inline constexpr const char* kAlphabet = "0123456789bcdefghjkmnpqrstuvwxyz";
inline constexpr int kMaxPrecision = 12;

struct GeoCell {
  std::string code;
  int precision = 0;
  double lat_min = 0.0, lat_max = 0.0;
  double lon_min = 0.0, lon_max = 0.0;

  geo::LatLon center() const {
    return {(lat_min + lat_max) / 2.0, (lon_min + lon_max) / 2.0};
  }
  // Half-open containment matching encode(): a point on the upper/right
  // split line belongs to the upper/right cell.
  bool contains(double lat, double lon) const {
    return lat >= lat_min && lat < lat_max && lon >= lon_min && lon < lon_max;
  }
};

// Standard base-32 geohash, longitude bit first, 5 bits per character.
// A coordinate exactly on a split goes to the upper/right interval.
GeoCell encode(double lat, double lon, int precision);

// Inverse of encode: the bounding box of a code. Throws DataError on an
// invalid character, ConfigError on empty or overlong codes.
GeoCell cell_bounds(const std::string& code);

// Metric cell size at a latitude: width is the great-circle length of the
// southern edge of the cell band containing `lat`, height the meridional
// extent. Spherical Earth.
std::pair<double, double> cell_dimensions(int precision, double lat);

// Degree spans of one cell at a precision (lat span, lon span).
std::pair<double, double> cell_spans(int precision);

}  // namespace trajmap::geohash
