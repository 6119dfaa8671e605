#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "trajmap/tiler.hpp"

namespace trajmap::raster {

enum class Mode : std::uint8_t { grayscale, speed };

// Fixed-size pixel rendering of one tile. Background is 255 (white);
// trajectory pixels are 0 in grayscale mode and a speed ramp color in
// speed mode. Row 0 is the northern edge.
struct TileRaster {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 (grayscale) or 3 (speed)
  Mode mode = Mode::grayscale;
  std::vector<std::uint8_t> pixels;  // row-major, channels interleaved

  std::size_t index(int row, int col) const {
    return (static_cast<std::size_t>(row) * width + col) * channels;
  }
  bool operator==(const TileRaster&) const = default;
};

// Red (stopped) to green (at v_max), rounded half away from zero; a vertex
// with no recorded speed gets sentinel blue.
std::array<std::uint8_t, 3> speed_to_color(std::optional<double> speed_mps,
                                           double v_max_mps);

// Deterministic rasterization: the cell box maps affinely onto the full
// size x size square (geohash cells are ~2:1, so the stretch is
// anisotropic), each chain edge is drawn with an integer midpoint line
// thickened by a square brush, speed mode colors an edge by its start
// vertex. An empty clip yields an all-background raster.
TileRaster render_tile(const tiler::TileClip& clip, int size, Mode mode,
                       double v_max_mps, int line_width);

// Box resampling to w x h; returns per-channel means as doubles in the
// same interleaved layout. Exact overlap weighting, no RNG.
std::vector<double> resize_mean(const TileRaster& src, int w, int h);

std::size_t count_background(const TileRaster& r);

}  // namespace trajmap::raster
