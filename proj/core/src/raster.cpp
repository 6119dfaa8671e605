#include "trajmap/raster.hpp"

#include <algorithm>
#include <cmath>

#include "trajmap/errors.hpp"

namespace trajmap::raster {

namespace {

struct Painter {
  TileRaster& img;
  int half_lo, half_hi;  // square brush offsets [half_lo, half_hi]

  Painter(TileRaster& raster, int line_width)
      : img(raster),
        half_lo(-(line_width / 2)),
        half_hi((line_width - 1) / 2) {}

  void stamp(int x, int y, const std::array<std::uint8_t, 3>& color) {
    for (int dy = half_lo; dy <= half_hi; ++dy) {
      const int py = y + dy;
      if (py < 0 || py >= img.height) continue;
      for (int dx = half_lo; dx <= half_hi; ++dx) {
        const int px = x + dx;
        if (px < 0 || px >= img.width) continue;
        auto* p = img.pixels.data() + img.index(py, px);
        if (img.channels == 1) {
          p[0] = color[0];
        } else {
          p[0] = color[0];
          p[1] = color[1];
          p[2] = color[2];
        }
      }
    }
  }

  // Integer midpoint line.
  void line(int x0, int y0, int x1, int y1,
            const std::array<std::uint8_t, 3>& color) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    int x = x0, y = y0;
    while (true) {
      stamp(x, y, color);
      if (x == x1 && y == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
    }
  }
};

}  // namespace

std::array<std::uint8_t, 3> speed_to_color(std::optional<double> speed_mps,
                                           double v_max_mps) {
  if (!speed_mps) return {0, 0, 255};
  const double s = std::clamp(*speed_mps / v_max_mps, 0.0, 1.0);
  return {static_cast<std::uint8_t>(std::llround((1.0 - s) * 255.0)),
          static_cast<std::uint8_t>(std::llround(s * 255.0)), 0};
}

TileRaster render_tile(const tiler::TileClip& clip, int size, Mode mode,
                       double v_max_mps, int line_width) {
  if (size < 16) throw ConfigError("raster size must be >= 16");
  if (line_width < 1) throw ConfigError("line width must be >= 1");
  if (mode == Mode::speed && !(v_max_mps > 0.0))
    throw ConfigError("v_max must be positive");

  TileRaster img;
  img.width = size;
  img.height = size;
  img.channels = mode == Mode::speed ? 3 : 1;
  img.mode = mode;
  img.pixels.assign(
      static_cast<std::size_t>(size) * size * img.channels, 255);

  const double w = clip.width_m();
  const double h = clip.height_m();
  if (w <= 0.0 || h <= 0.0) return img;

  // Local meters -> pixel, floor convention, clamped to the grid.
  const auto to_px = [&](double v, double span) {
    const auto p = static_cast<int>(std::floor(v / span * size));
    return std::clamp(p, 0, size - 1);
  };

  Painter painter(img, line_width);
  for (const auto& chain : clip.segments) {
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const auto& a = chain[i];
      const auto& b = chain[i + 1];
      const auto color = mode == Mode::speed
                             ? speed_to_color(a.speed, v_max_mps)
                             : std::array<std::uint8_t, 3>{0, 0, 0};
      painter.line(to_px(a.x, w), to_px(h - a.y, h), to_px(b.x, w),
                   to_px(h - b.y, h), color);
    }
  }
  return img;
}

std::vector<double> resize_mean(const TileRaster& src, int w, int h) {
  if (w < 1 || h < 1) throw ConfigError("resize target must be positive");
  std::vector<double> out(static_cast<std::size_t>(w) * h * src.channels, 0.0);
  const double sx = static_cast<double>(src.width) / w;
  const double sy = static_cast<double>(src.height) / h;
  for (int tr = 0; tr < h; ++tr) {
    const double y0 = tr * sy, y1 = (tr + 1) * sy;
    const int r0 = static_cast<int>(std::floor(y0));
    const int r1 = std::min(static_cast<int>(std::ceil(y1)), src.height);
    for (int tc = 0; tc < w; ++tc) {
      const double x0 = tc * sx, x1 = (tc + 1) * sx;
      const int c0 = static_cast<int>(std::floor(x0));
      const int c1 = std::min(static_cast<int>(std::ceil(x1)), src.width);
      for (int ch = 0; ch < src.channels; ++ch) {
        double acc = 0.0, area = 0.0;
        for (int r = r0; r < r1; ++r) {
          const double wr =
              std::min<double>(y1, r + 1) - std::max<double>(y0, r);
          for (int c = c0; c < c1; ++c) {
            const double wc =
                std::min<double>(x1, c + 1) - std::max<double>(x0, c);
            acc += wr * wc * src.pixels[src.index(r, c) + ch];
            area += wr * wc;
          }
        }
        out[(static_cast<std::size_t>(tr) * w + tc) * src.channels + ch] =
            acc / area;
      }
    }
  }
  return out;
}

std::size_t count_background(const TileRaster& r) {
  std::size_t n = 0;
  const std::size_t px =
      static_cast<std::size_t>(r.width) * r.height;
  for (std::size_t i = 0; i < px; ++i) {
    bool bg = true;
    for (int ch = 0; ch < r.channels; ++ch)
      if (r.pixels[i * r.channels + ch] != 255) bg = false;
    if (bg) ++n;
  }
  return n;
}

}  // namespace trajmap::raster
