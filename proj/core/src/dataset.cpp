#include "trajmap/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trajmap/errors.hpp"

namespace trajmap::dataset {

LabelResult label_cells(const std::map<std::string, tiler::TileClip>& tiles,
                        const std::vector<geo::LatLon>& intersections,
                        std::size_t min_points) {
  if (min_points < 1) throw ConfigError("min_points must be >= 1");
  LabelResult out;
  for (const auto& [code, clip] : tiles) {
    if (clip.point_count < min_points) {
      ++out.excluded_sparse;
      continue;
    }
    bool hit = false;
    for (const auto& p : intersections) {
      if (clip.cell.contains(p.lat, p.lon)) {
        hit = true;
        break;
      }
    }
    out.labels.emplace_back(code, hit ? Label::intersection : Label::straight);
  }
  return out;
}

Split split_dataset(const std::vector<TileSample>& samples,
                    double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ConfigError("test_fraction must be in (0, 1)");

  std::vector<std::size_t> strata[2];
  for (std::size_t i = 0; i < samples.size(); ++i)
    strata[static_cast<int>(samples[i].label)].push_back(i);
  if (strata[0].empty() || strata[1].empty())
    throw ConfigError("split requires samples of both classes");

  const auto n = samples.size();
  const auto target = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * test_fraction));

  // Largest-remainder apportionment of the total test target.
  std::size_t take[2];
  double rem[2];
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double ideal = static_cast<double>(strata[c].size()) * test_fraction;
    take[c] = static_cast<std::size_t>(std::floor(ideal));
    rem[c] = ideal - static_cast<double>(take[c]);
    assigned += take[c];
  }
  int order[2] = {0, 1};
  if (rem[1] > rem[0]) std::swap(order[0], order[1]);
  for (int k = 0; assigned < target; ++k) {
    ++take[order[k % 2]];
    ++assigned;
  }

  std::vector<bool> in_test(n, false);
  for (int c = 0; c < 2; ++c) {
    auto idx = strata[c];
    rng::Engine eng(rng::mix(seed, rng::hash_str(c == 0 ? "split:intersection"
                                                        : "split:straight")));
    eng.shuffle(idx);
    for (std::size_t k = 0; k < take[c] && k < idx.size(); ++k)
      in_test[idx[k]] = true;
  }

  Split out;
  for (std::size_t i = 0; i < n; ++i)
    (in_test[i] ? out.test : out.train).push_back(samples[i]);
  return out;
}

namespace {

raster::TileRaster like(const raster::TileRaster& r) {
  raster::TileRaster out = r;
  std::fill(out.pixels.begin(), out.pixels.end(), std::uint8_t{255});
  return out;
}

}  // namespace

raster::TileRaster flip_h(const raster::TileRaster& r) {
  raster::TileRaster out = r;
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      for (int c = 0; c < r.channels; ++c)
        out.pixels[out.index(y, r.width - 1 - x) + c] =
            r.pixels[r.index(y, x) + c];
  return out;
}

raster::TileRaster flip_v(const raster::TileRaster& r) {
  raster::TileRaster out = r;
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      for (int c = 0; c < r.channels; ++c)
        out.pixels[out.index(r.height - 1 - y, x) + c] =
            r.pixels[r.index(y, x) + c];
  return out;
}

raster::TileRaster rotate_quarter(const raster::TileRaster& r, int turns) {
  const int t = ((turns % 4) + 4) % 4;
  if (t == 0) return r;
  if (r.width != r.height) throw ConfigError("quarter turns need square rasters");
  raster::TileRaster out = r;
  const int n = r.width;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      int sy = y, sx = x;  // source for out(y, x), counterclockwise turns
      if (t == 1) { sy = x; sx = n - 1 - y; }
      else if (t == 2) { sy = n - 1 - y; sx = n - 1 - x; }
      else { sy = n - 1 - x; sx = y; }
      for (int c = 0; c < r.channels; ++c)
        out.pixels[out.index(y, x) + c] = r.pixels[r.index(sy, sx) + c];
    }
  return out;
}

raster::TileRaster warp(const raster::TileRaster& r, double angle_deg,
                        double shear_deg) {
  raster::TileRaster out = like(r);
  const double a = angle_deg * geo::kDegToRad;
  const double s = std::tan(shear_deg * geo::kDegToRad);
  const double ca = std::cos(a), sa = std::sin(a);
  const double cx = (r.width - 1) / 2.0, cy = (r.height - 1) / 2.0;
  // Forward map = shear(x += s*y) after rotate; invert per destination pixel.
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x) {
      const double dx = (x - cx) - s * (y - cy);
      const double dy = y - cy;
      const double ux = ca * dx + sa * dy;   // rotate back
      const double uy = -sa * dx + ca * dy;
      const auto sx = static_cast<long>(std::lround(ux + cx));
      const auto sy = static_cast<long>(std::lround(uy + cy));
      if (sx < 0 || sx >= r.width || sy < 0 || sy >= r.height) continue;
      for (int c = 0; c < r.channels; ++c)
        out.pixels[out.index(y, x) + c] =
            r.pixels[r.index(static_cast<int>(sy), static_cast<int>(sx)) + c];
    }
  return out;
}

raster::TileRaster box_blur(const raster::TileRaster& r, int radius) {
  if (radius <= 0) return r;
  raster::TileRaster out = r;
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x) {
      const int y0 = std::max(0, y - radius), y1 = std::min(r.height - 1, y + radius);
      const int x0 = std::max(0, x - radius), x1 = std::min(r.width - 1, x + radius);
      const auto area = static_cast<long>(y1 - y0 + 1) * (x1 - x0 + 1);
      for (int c = 0; c < r.channels; ++c) {
        long sum = 0;
        for (int yy = y0; yy <= y1; ++yy)
          for (int xx = x0; xx <= x1; ++xx)
            sum += r.pixels[r.index(yy, xx) + c];
        // round half away from zero on the non-negative mean
        out.pixels[out.index(y, x) + c] =
            static_cast<std::uint8_t>((2 * sum + area) / (2 * area));
      }
    }
  return out;
}

raster::TileRaster add_noise(const raster::TileRaster& r, int amplitude,
                             rng::Engine& eng) {
  if (amplitude <= 0) return r;
  raster::TileRaster out = r;
  const auto span = static_cast<std::uint64_t>(2 * amplitude + 1);
  for (auto& px : out.pixels) {
    const int d = static_cast<int>(eng.bounded(span)) - amplitude;
    px = static_cast<std::uint8_t>(std::clamp(px + d, 0, 255));
  }
  return out;
}

std::vector<TileSample> augment(const TileSample& sample, int k,
                                std::uint64_t seed) {
  if (k < 0) throw ConfigError("augmentation count must be >= 0");
  std::vector<TileSample> out;
  out.reserve(static_cast<std::size_t>(k));
  const auto base = rng::mix(seed, rng::hash_str(sample.code));
  for (int v = 0; v < k; ++v) {
    rng::Engine eng(rng::mix(base, static_cast<std::uint64_t>(v)));
    raster::TileRaster img = sample.raster;
    if (eng.bounded(2)) img = flip_h(img);
    if (eng.bounded(2)) img = flip_v(img);
    if (img.width == img.height)
      img = rotate_quarter(img, static_cast<int>(eng.bounded(4)));
    const double angle = eng.uniform(-15.0, 15.0);
    const double shear = eng.uniform(-10.0, 10.0);
    img = warp(img, angle, shear);
    img = box_blur(img, static_cast<int>(eng.bounded(3)));
    img = add_noise(img, 10, eng);
    out.push_back(TileSample{sample.code, std::move(img), sample.label,
                             Provenance::augmented});
  }
  return out;
}

}  // namespace trajmap::dataset
