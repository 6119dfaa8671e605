#pragma once

#include <algorithm>
#include <cmath>

namespace trajmap::geo {

// Mean spherical Earth radius, meters.
inline constexpr double kEarthRadiusM = 6371008.8;

inline constexpr double kDegToRad = M_PI / 180.0;

// Meters per degree of latitude on the sphere.
inline constexpr double kMetersPerDegLat = kEarthRadiusM * kDegToRad;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

struct XY {
  double x = 0.0;
  double y = 0.0;
};

// Local equirectangular frame about a reference point. Accurate to well
// under a millimeter at geohash-cell extents; a few centimeters at 1 km.
class LocalFrame {
 public:
  LocalFrame(double origin_lat, double origin_lon, double ref_lat)
      : lat0_(origin_lat),
        lon0_(origin_lon),
        mx_(kMetersPerDegLat * std::cos(ref_lat * kDegToRad)) {}

  // Frame centered on `origin`, longitude scale taken at the origin latitude.
  explicit LocalFrame(const LatLon& origin)
      : LocalFrame(origin.lat, origin.lon, origin.lat) {}

  XY to_xy(const LatLon& p) const {
    return {(p.lon - lon0_) * mx_, (p.lat - lat0_) * kMetersPerDegLat};
  }

  LatLon to_latlon(const XY& p) const {
    return {lat0_ + p.y / kMetersPerDegLat, lon0_ + p.x / mx_};
  }

  double meters_per_deg_lon() const { return mx_; }

 private:
  double lat0_, lon0_, mx_;
};

inline double dist(const XY& a, const XY& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Distance from p to segment [a, b].
inline double point_segment_dist(const XY& p, const XY& a, const XY& b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double cx = a.x + t * vx, cy = a.y + t * vy;
  return std::hypot(p.x - cx, p.y - cy);
}

}  // namespace trajmap::geo
