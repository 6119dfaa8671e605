#pragma once

#include "trajmap/tiler.hpp"
#include "trajmap/types.hpp"

namespace trajmap::heuristic {

// Geometry-only baseline: snaps chain vertices and chain-chain crossing
// points to a snap-sized grid, merges incident edge directions closer than
// min_branch degrees, and calls the tile an intersection iff some node keeps
// three or more distinct branches. Score is 1.0 or 0.0.
// Throws DataError("unclassifiable") for a clip with no chains.
Prediction classify(const tiler::TileClip& clip, double snap_m,
                    double min_branch_deg);

}  // namespace trajmap::heuristic
