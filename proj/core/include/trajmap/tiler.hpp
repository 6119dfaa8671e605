#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trajmap/geohash.hpp"
#include "trajmap/types.hpp"

namespace trajmap::tiler {

// Vertex of a clipped chain in the cell-local frame:
//   x = (lon - lon_min) * cos(lat_center) * R * pi/180
//   y = (lat - lat_min) * R * pi/180
struct ClipVertex {
  double x = 0.0;
  double y = 0.0;
  std::optional<double> speed;
};

using Chain = std::vector<ClipVertex>;

struct PathVertex {
  double lat = 0.0;
  double lon = 0.0;
  std::optional<double> speed;
};

struct TileClip {
  geohash::GeoCell cell;
  std::vector<Chain> segments;   // each chain has >= 2 vertices
  std::size_t point_count = 0;   // input waypoints whose geohash is this cell

  // Projected cell extent in meters.
  double width_m() const;
  double height_m() const;
};

// Maximal sub-chains of `path` inside the cell box, split at exact boundary
// crossings (parametric clipping, with position and speed interpolated
// linearly). An empty result is valid.
std::vector<Chain> clip_polyline(const std::vector<PathVertex>& path,
                                 const geohash::GeoCell& cell);

std::vector<PathVertex> to_path(const Journey& journey);

// Clips every journey to every geohash cell it geometrically intersects
// (a segment contributes to cells it crosses even without a vertex there).
// Keys are exactly the codes touched by at least one chain, in
// lexicographic order; chains appear in (journey id, path order).
std::map<std::string, TileClip> assign_tiles(
    const std::vector<Journey>& journeys, int precision);

}  // namespace trajmap::tiler
