#pragma once

#include <cstdint>
#include <vector>

#include "trajmap/geo.hpp"

namespace trajmap {

// Reference road graph: nodes with WGS84 positions, undirected edges
// between node indices. Nodes of degree >= 3 are the intersection set.
struct RoadNetwork {
  struct Node {
    std::int64_t id = 0;
    double lat = 0.0;
    double lon = 0.0;
  };
  struct Edge {
    std::uint32_t a = 0;  // node indices, not ids
    std::uint32_t b = 0;
  };

  std::vector<Node> nodes;
  std::vector<Edge> edges;

  std::vector<int> degrees() const {
    std::vector<int> deg(nodes.size(), 0);
    for (const auto& e : edges) {
      ++deg[e.a];
      ++deg[e.b];
    }
    return deg;
  }

  // Indices of nodes with degree >= 3.
  std::vector<std::uint32_t> intersection_nodes() const {
    std::vector<std::uint32_t> out;
    const auto deg = degrees();
    for (std::uint32_t i = 0; i < nodes.size(); ++i)
      if (deg[i] >= 3) out.push_back(i);
    return out;
  }

  std::vector<geo::LatLon> intersection_points() const {
    std::vector<geo::LatLon> out;
    for (auto i : intersection_nodes())
      out.push_back({nodes[i].lat, nodes[i].lon});
    return out;
  }
};

}  // namespace trajmap
