#pragma once

#include <string>

#include "trajmap/raster.hpp"

namespace trajmap::png {

// 8-bit non-interlaced PNG, color type 0 (grayscale) or 2 (RGB). The
// encoder always emits filter-0 scanlines through one zlib stream, so a
// given raster has exactly one byte representation.
std::string encode(const raster::TileRaster& img);
void write_file(const raster::TileRaster& img, const std::string& path);

// Decodes the subset above plus filtered scanlines (types 0-4); RGBA input
// is not supported. Throws DataError on malformed data.
raster::TileRaster decode(const std::string& bytes);
raster::TileRaster read_file(const std::string& path);

}  // namespace trajmap::png
