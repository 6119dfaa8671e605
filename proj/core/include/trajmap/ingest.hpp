#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "trajmap/network.hpp"
#include "trajmap/types.hpp"

namespace trajmap::ingest {

struct LoadResult {
  std::vector<WayPoint> points;  // parseable rows, input order
  std::size_t rejected = 0;      // rows failing the WayPoint invariants
};

// Reads the waypoint CSV (header: journey_id,timestamp_ms,lat,lon,speed_mps;
// speed_mps may be empty). Invalid rows are counted, not fatal. Throws
// DataError on an unreadable stream or a header missing mandatory columns.
LoadResult load_waypoints(std::istream& in);

struct BuildResult {
  std::vector<Journey> journeys;   // sorted by id
  std::size_t dropped_groups = 0;  // groups with < 2 points after de-dup
};

// Groups points by journey_id and sorts by (t, lat, lon); of duplicate
// timestamps the first in that order survives, so the result does not
// depend on input permutation.
BuildResult build_journeys(std::vector<WayPoint> points);

struct FilterResult {
  std::vector<Journey> journeys;
  std::size_t dropped_points = 0;
  std::size_t dropped_journeys = 0;
};

// Removes every waypoint farther than max_offset_m from all network edges
// (point-to-segment distance in a local plane about the point), then
// re-applies the minimum journey length. Throws ConfigError on an empty
// network or non-positive offset.
FilterResult filter_to_reference(std::vector<Journey> journeys,
                                 const RoadNetwork& network,
                                 double max_offset_m);

}  // namespace trajmap::ingest
