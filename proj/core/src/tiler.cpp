#include "trajmap/tiler.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "trajmap/errors.hpp"

namespace trajmap::tiler {

namespace {

struct CellFrame {
  double lon_min, lat_min, mx, my;

  explicit CellFrame(const geohash::GeoCell& cell)
      : lon_min(cell.lon_min),
        lat_min(cell.lat_min),
        mx(geo::kMetersPerDegLat *
           std::cos(cell.center().lat * geo::kDegToRad)),
        my(geo::kMetersPerDegLat) {}

  ClipVertex to_local(double lat, double lon,
                      const std::optional<double>& speed) const {
    return {(lon - lon_min) * mx, (lat - lat_min) * my, speed};
  }
};

// Parametric clip of segment a->b against the cell box in degree space.
// Returns false when the segment misses the box; otherwise [t0, t1] is the
// inside parameter range.
bool clip_params(const PathVertex& a, const PathVertex& b,
                 const geohash::GeoCell& cell, double& t0, double& t1) {
  const double dx = b.lon - a.lon;
  const double dy = b.lat - a.lat;
  t0 = 0.0;
  t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {a.lon - cell.lon_min, cell.lon_max - a.lon,
                       a.lat - cell.lat_min, cell.lat_max - a.lat};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;  // parallel and outside
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      if (r > t1) return false;
      if (r > t0) t0 = r;
    } else {
      if (r < t0) return false;
      if (r < t1) t1 = r;
    }
  }
  return t0 <= t1;
}

std::optional<double> lerp_speed(const PathVertex& a, const PathVertex& b,
                                 double t) {
  if (t == 0.0) return a.speed;
  if (t == 1.0) return b.speed;
  if (a.speed && b.speed) return *a.speed + t * (*b.speed - *a.speed);
  return std::nullopt;
}

PathVertex lerp(const PathVertex& a, const PathVertex& b, double t) {
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  return {a.lat + t * (b.lat - a.lat), a.lon + t * (b.lon - a.lon),
          lerp_speed(a, b, t)};
}

// Clips path vertices [first, last] against the cell, appending maximal
// sub-chains. Consecutive segment pieces merge when the earlier one runs to
// its endpoint (t1 == 1) and the next starts at its own (t0 == 0).
void clip_range(const std::vector<PathVertex>& path, std::size_t first,
                std::size_t last, const geohash::GeoCell& cell,
                std::vector<Chain>& out) {
  const CellFrame frame(cell);
  Chain current;
  bool open = false;
  for (std::size_t i = first; i < last; ++i) {
    const auto& a = path[i];
    const auto& b = path[i + 1];
    double t0, t1;
    const bool zero_len = (a.lat == b.lat && a.lon == b.lon);
    if (!clip_params(a, b, cell, t0, t1) || (!zero_len && t0 >= t1)) {
      // Miss, or a single-point touch: nothing drawable from this segment.
      if (current.size() >= 2) out.push_back(std::move(current));
      current.clear();
      open = false;
      continue;
    }
    const auto entry = lerp(a, b, t0);
    const auto exit = lerp(a, b, t1);
    if (open && t0 == 0.0) {
      current.push_back(frame.to_local(exit.lat, exit.lon, exit.speed));
    } else {
      if (current.size() >= 2) out.push_back(std::move(current));
      current.clear();
      current.push_back(frame.to_local(entry.lat, entry.lon, entry.speed));
      current.push_back(frame.to_local(exit.lat, exit.lon, exit.speed));
    }
    open = (t1 == 1.0);
  }
  if (current.size() >= 2) out.push_back(std::move(current));
}

}  // namespace

double TileClip::width_m() const {
  return (cell.lon_max - cell.lon_min) * geo::kMetersPerDegLat *
         std::cos(cell.center().lat * geo::kDegToRad);
}

double TileClip::height_m() const {
  return (cell.lat_max - cell.lat_min) * geo::kMetersPerDegLat;
}

std::vector<Chain> clip_polyline(const std::vector<PathVertex>& path,
                                 const geohash::GeoCell& cell) {
  std::vector<Chain> out;
  if (path.size() < 2) return out;
  clip_range(path, 0, path.size() - 1, cell, out);
  return out;
}

std::vector<PathVertex> to_path(const Journey& journey) {
  std::vector<PathVertex> path;
  path.reserve(journey.points.size());
  for (const auto& p : journey.points)
    path.push_back({p.lat, p.lon, p.speed_mps});
  return path;
}

std::map<std::string, TileClip> assign_tiles(
    const std::vector<Journey>& journeys, int precision) {
  const auto [dlat, dlon] = geohash::cell_spans(precision);
  const auto lat_bands = static_cast<std::int64_t>(std::llround(180.0 / dlat));
  const auto lon_bands = static_cast<std::int64_t>(std::llround(360.0 / dlon));

  const auto band_code = [&](std::int64_t bi, std::int64_t bj) {
    const double lat = -90.0 + (static_cast<double>(bi) + 0.5) * dlat;
    const double lon = -180.0 + (static_cast<double>(bj) + 0.5) * dlon;
    return geohash::encode(lat, lon, precision);
  };

  std::map<std::string, TileClip> tiles;
  for (const auto& journey : journeys) {
    const auto path = to_path(journey);
    if (path.size() < 2) continue;

    // Candidate cells per segment, keyed by band index; remembers which
    // segments may touch each cell so chains are clipped in path order.
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>>
        touched;
    for (std::size_t s = 0; s + 1 < path.size(); ++s) {
      const double lat_lo = std::min(path[s].lat, path[s + 1].lat);
      const double lat_hi = std::max(path[s].lat, path[s + 1].lat);
      const double lon_lo = std::min(path[s].lon, path[s + 1].lon);
      const double lon_hi = std::max(path[s].lon, path[s + 1].lon);
      auto bi0 = static_cast<std::int64_t>(std::floor((lat_lo + 90.0) / dlat));
      auto bi1 = static_cast<std::int64_t>(std::floor((lat_hi + 90.0) / dlat));
      auto bj0 = static_cast<std::int64_t>(std::floor((lon_lo + 180.0) / dlon));
      auto bj1 = static_cast<std::int64_t>(std::floor((lon_hi + 180.0) / dlon));
      bi0 = std::clamp<std::int64_t>(bi0, 0, lat_bands - 1);
      bi1 = std::clamp<std::int64_t>(bi1, 0, lat_bands - 1);
      bj0 = std::clamp<std::int64_t>(bj0, 0, lon_bands - 1);
      bj1 = std::clamp<std::int64_t>(bj1, 0, lon_bands - 1);
      for (std::int64_t bi = bi0; bi <= bi1; ++bi)
        for (std::int64_t bj = bj0; bj <= bj1; ++bj)
          touched[{bi, bj}].push_back(s);
    }

    for (const auto& [band, segs] : touched) {
      const auto cell = band_code(band.first, band.second);
      std::vector<Chain> chains;
      // Clip each run of consecutive segment indices as one sub-polyline;
      // non-consecutive segments cannot join in a chain.
      std::size_t run_start = 0;
      while (run_start < segs.size()) {
        std::size_t run_end = run_start;
        while (run_end + 1 < segs.size() &&
               segs[run_end + 1] == segs[run_end] + 1)
          ++run_end;
        clip_range(path, segs[run_start], segs[run_end] + 1, cell, chains);
        run_start = run_end + 1;
      }
      if (chains.empty()) continue;
      auto [it, inserted] = tiles.try_emplace(cell.code);
      if (inserted) it->second.cell = cell;
      auto& dst = it->second.segments;
      dst.insert(dst.end(), std::make_move_iterator(chains.begin()),
                 std::make_move_iterator(chains.end()));
    }
  }

  // Waypoint density per cell, counted once per input vertex.
  for (const auto& journey : journeys) {
    for (const auto& p : journey.points) {
      const auto code = geohash::encode(p.lat, p.lon, precision).code;
      auto it = tiles.find(code);
      if (it != tiles.end()) ++it->second.point_count;
    }
  }
  return tiles;
}

}  // namespace trajmap::tiler
