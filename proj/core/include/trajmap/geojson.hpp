#pragma once

#include <string>
#include <utility>
#include <vector>

#include "trajmap/geo.hpp"
#include "trajmap/geohash.hpp"
#include "trajmap/network.hpp"
#include "trajmap/types.hpp"

namespace trajmap::geojson {

// FeatureCollection with one LineString per edge and one Point per
// degree->=3 node, tagged {"role": "intersection"}. The Point format doubles
// as the import format for externally supplied intersection inventories.
std::string export_network(const RoadNetwork& net);

struct NetworkFile {
  RoadNetwork network;
  std::vector<geo::LatLon> intersections;
};

// Accepts what export_network writes, plus multi-vertex LineStrings
// (consecutive coordinate pairs become edges; nodes dedup on exact
// coordinates). If the file tags no intersection Points, the degree->=3
// nodes stand in.
NetworkFile load_network(const std::string& text);
NetworkFile load_network_file(const std::string& path);

// Classified map: one closed bbox Polygon per cell, features sorted by
// geohash code, properties {geohash, class, score, color} — green for
// intersections, blue for straights.
std::string export_map(
    const std::vector<std::pair<geohash::GeoCell, Prediction>>& cells);

}  // namespace trajmap::geojson
