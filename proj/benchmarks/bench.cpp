#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "trajmap/geohash.hpp"
#include "trajmap/heuristic.hpp"
#include "trajmap/model.hpp"
#include "trajmap/raster.hpp"
#include "trajmap/rng.hpp"
#include "trajmap/tiler.hpp"

using namespace trajmap;

namespace {

std::vector<geo::LatLon> sample_points(std::size_t n) {
  rng::Engine eng(12);
  std::vector<geo::LatLon> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back({eng.uniform(-85.0, 85.0), eng.uniform(-180.0, 180.0)});
  return pts;
}

Journey wander_journey(std::size_t n) {
  rng::Engine eng(34);
  Journey j;
  j.id = "bench";
  double lat = 40.0, lon = -88.0;
  std::int64_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    WayPoint p;
    p.journey_id = j.id;
    p.t_ms = t;
    t += 1000;
    p.lat = lat;
    p.lon = lon;
    p.speed_mps = eng.uniform(0.0, 30.0);
    j.points.push_back(p);
    lat += eng.uniform(-1.0, 1.0) * 30.0 / geo::kMetersPerDegLat;
    lon += eng.uniform(-1.0, 1.0) * 30.0 / geo::kMetersPerDegLat;
  }
  return j;
}

tiler::TileClip busy_clip() {
  const auto cell = geohash::encode(40.0, -88.0, 8);
  const double dlat = cell.lat_max - cell.lat_min;
  const double dlon = cell.lon_max - cell.lon_min;
  tiler::TileClip clip;
  clip.cell = cell;
  rng::Engine eng(56);
  for (int c = 0; c < 8; ++c) {
    std::vector<tiler::PathVertex> path;
    for (int v = 0; v < 5; ++v)
      path.push_back({cell.lat_min + eng.next_unit() * dlat * 1.4 - dlat * 0.2,
                      cell.lon_min + eng.next_unit() * dlon * 1.4 - dlon * 0.2,
                      eng.uniform(0.0, 30.0)});
    for (auto& chain : tiler::clip_polyline(path, cell))
      clip.segments.push_back(chain);
  }
  clip.point_count = 40;
  return clip;
}

raster::TileRaster speed_raster(int size) {
  rng::Engine eng(78);
  raster::TileRaster r;
  r.width = size;
  r.height = size;
  r.channels = 3;
  r.mode = raster::Mode::speed;
  r.pixels.resize(static_cast<std::size_t>(size) * size * 3);
  for (auto& px : r.pixels) px = static_cast<std::uint8_t>(eng.bounded(256));
  return r;
}

void BM_GeohashEncode(benchmark::State& state) {
  const auto pts = sample_points(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = pts[i++ & 1023];
    benchmark::DoNotOptimize(geohash::encode(p.lat, p.lon, 8));
  }
}
BENCHMARK(BM_GeohashEncode);

void BM_GeohashDecode(benchmark::State& state) {
  const auto pts = sample_points(1024);
  std::vector<std::string> codes;
  codes.reserve(pts.size());
  for (const auto& p : pts) codes.push_back(geohash::encode(p.lat, p.lon, 8).code);
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(geohash::cell_bounds(codes[i++ & 1023]));
}
BENCHMARK(BM_GeohashDecode);

void BM_AssignTiles(benchmark::State& state) {
  const auto j = wander_journey(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(tiler::assign_tiles({j}, 8));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AssignTiles)->Arg(64)->Arg(512);

void BM_RenderTile(benchmark::State& state) {
  const auto clip = busy_clip();
  const int size = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        raster::render_tile(clip, size, raster::Mode::speed, 35.0, 2));
}
BENCHMARK(BM_RenderTile)->Arg(64)->Arg(640);

void BM_HeuristicClassify(benchmark::State& state) {
  const auto clip = busy_clip();
  for (auto _ : state)
    benchmark::DoNotOptimize(heuristic::classify(clip, 2.0, 30.0));
}
BENCHMARK(BM_HeuristicClassify);

void BM_ModelForward(benchmark::State& state) {
  const auto m = model::make_model(64, 3, 9);
  const auto r = speed_raster(64);
  for (auto _ : state) benchmark::DoNotOptimize(model::forward_probs(m, r));
}
BENCHMARK(BM_ModelForward);

}  // namespace

BENCHMARK_MAIN();
