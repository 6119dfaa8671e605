#pragma once

#include <cstdint>
#include <vector>

#include "trajmap/network.hpp"
#include "trajmap/types.hpp"

namespace trajmap::simgen {

enum class NetworkKind { grid, perturbed_grid };

// rows x cols lattice with 4-neighbor edges and `spacing_m` node pitch.
// perturbed_grid additionally jitters each node by up to 0.2*spacing and
// drops each non-bridge edge with probability 0.15, seeded.
RoadNetwork generate_network(NetworkKind kind, int rows, int cols,
                             double spacing_m, geo::LatLon origin,
                             std::uint64_t seed);

struct SimConfig {
  double sample_interval_s = 1.0;
  double cruise_speed_mps = 15.0;
  double slow_factor = 0.3;    // speed multiplier near intersections
  double slow_radius_m = 40.0; // distance to a degree>=3 node that slows
  double gps_noise_sigma_m = 2.0;
  std::uint64_t seed = 0;
};

// Random simple paths of >= 3 edges walked at the speed profile, sampled
// every interval with isotropic Gaussian position noise. Networks too small
// for 3-edge simple paths (a lone edge, a plus) fall back to the longest
// path available. Waypoint speed fields carry the noise-free profile speed.
// Fully seed-deterministic; output sorted by journey id. Throws DataError
// when no traversable path exists at all.
std::vector<Journey> simulate_trajectories(const RoadNetwork& network,
                                           int n_journeys,
                                           const SimConfig& config);

}  // namespace trajmap::simgen
