#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "trajmap/geo.hpp"
#include "trajmap/raster.hpp"
#include "trajmap/rng.hpp"
#include "trajmap/tiler.hpp"
#include "trajmap/types.hpp"

namespace trajmap::dataset {

enum class Provenance : std::uint8_t { original, augmented };

struct TileSample {
  std::string code;  // geohash of the originating cell
  raster::TileRaster raster;
  Label label = Label::straight;
  Provenance provenance = Provenance::original;
};

struct LabelResult {
  std::vector<std::pair<std::string, Label>> labels;  // cell code order
  std::size_t excluded_sparse = 0;
};

// A cell is an intersection iff at least one known intersection point falls
// inside its bbox. Cells with fewer than min_points waypoints are too sparse
// to classify and are excluded (counted, not labeled).
LabelResult label_cells(const std::map<std::string, tiler::TileClip>& tiles,
                        const std::vector<geo::LatLon>& intersections,
                        std::size_t min_points);

struct Split {
  std::vector<TileSample> train;
  std::vector<TileSample> test;
};

// Stratified by label. Test size = floor(n * test_fraction), apportioned to
// the strata by largest remainder; membership is drawn per stratum from the
// seed. Original sample order is preserved within each side.
Split split_dataset(const std::vector<TileSample>& samples,
                    double test_fraction, std::uint64_t seed);

// Elementary image transforms, exposed for direct testing. All fill exposed
// area with background white and preserve dimensions (square input assumed
// for quarter turns).
raster::TileRaster flip_h(const raster::TileRaster& r);
raster::TileRaster flip_v(const raster::TileRaster& r);
raster::TileRaster rotate_quarter(const raster::TileRaster& r, int turns);
// Rotation then shear about the image center, nearest-neighbor resampling.
raster::TileRaster warp(const raster::TileRaster& r, double angle_deg,
                        double shear_deg);
raster::TileRaster box_blur(const raster::TileRaster& r, int radius);
raster::TileRaster add_noise(const raster::TileRaster& r, int amplitude,
                             rng::Engine& eng);

// k augmented variants of an original sample. Variant i draws its transform
// parameters from (seed, sample code, i) alone, so augmentation is stable
// under reordering and parallelism.
std::vector<TileSample> augment(const TileSample& sample, int k,
                                std::uint64_t seed);

}  // namespace trajmap::dataset
