#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "trajmap/dataset.hpp"
#include "trajmap/errors.hpp"
#include "trajmap/geo.hpp"
#include "trajmap/geohash.hpp"
#include "trajmap/heuristic.hpp"
#include "trajmap/ingest.hpp"
#include "trajmap/simgen.hpp"
#include "trajmap/tiler.hpp"

using namespace trajmap;

namespace {

const geo::LatLon kOrigin{40.0, -88.0};

RoadNetwork single_edge_1000m() {
  RoadNetwork net;
  const geo::LocalFrame frame(kOrigin);
  const auto b = frame.to_latlon({1000.0, 0.0});
  net.nodes = {{0, kOrigin.lat, kOrigin.lon}, {1, b.lat, b.lon}};
  net.edges = {{0, 1}};
  return net;
}

RoadNetwork plus_network(double arm_m) {
  RoadNetwork net;
  const geo::LocalFrame frame(kOrigin);
  const auto at = [&](double x, double y) {
    const auto p = frame.to_latlon({x, y});
    return RoadNetwork::Node{static_cast<std::int64_t>(net.nodes.size()),
                             p.lat, p.lon};
  };
  net.nodes.push_back(at(0, 0));
  net.nodes.push_back(at(arm_m, 0));
  net.nodes.push_back(at(-arm_m, 0));
  net.nodes.push_back(at(0, arm_m));
  net.nodes.push_back(at(0, -arm_m));
  net.edges = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
  return net;
}

simgen::SimConfig noiseless() {
  simgen::SimConfig c;
  c.gps_noise_sigma_m = 0.0;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_SUITE("simgen") {

TEST_CASE("grid networks have the expected shape") {
  const auto g33 = simgen::generate_network(simgen::NetworkKind::grid, 3, 3,
                                            400.0, kOrigin, 1);
  CHECK(g33.nodes.size() == 9);
  CHECK(g33.edges.size() == 12);
  CHECK(g33.intersection_nodes().size() == 5);  // 4 edge-centers + 1 center

  const auto g22 = simgen::generate_network(simgen::NetworkKind::grid, 2, 2,
                                            400.0, kOrigin, 1);
  CHECK(g22.nodes.size() == 4);
  CHECK(g22.edges.size() == 4);
  CHECK(g22.intersection_nodes().empty());

  // adjacent nodes sit one spacing apart
  const geo::LocalFrame frame(kOrigin);
  for (const auto& e : g33.edges) {
    const auto a = frame.to_xy({g33.nodes[e.a].lat, g33.nodes[e.a].lon});
    const auto b = frame.to_xy({g33.nodes[e.b].lat, g33.nodes[e.b].lon});
    CHECK(geo::dist(a, b) == doctest::Approx(400.0).epsilon(1e-9));
  }

  CHECK_THROWS_AS(
      simgen::generate_network(simgen::NetworkKind::grid, 1, 3, 400.0, kOrigin, 1),
      ConfigError);
  CHECK_THROWS_AS(
      simgen::generate_network(simgen::NetworkKind::grid, 3, 3, 0.0, kOrigin, 1),
      ConfigError);
}

TEST_CASE("perturbed grids: bounded jitter, subset edges, still connected") {
  const auto grid = simgen::generate_network(simgen::NetworkKind::grid, 5, 5,
                                             400.0, kOrigin, 21);
  const auto pert = simgen::generate_network(
      simgen::NetworkKind::perturbed_grid, 5, 5, 400.0, kOrigin, 21);
  REQUIRE(pert.nodes.size() == 25);

  const geo::LocalFrame frame(kOrigin);
  for (std::size_t i = 0; i < 25; ++i) {
    const auto a = frame.to_xy({grid.nodes[i].lat, grid.nodes[i].lon});
    const auto b = frame.to_xy({pert.nodes[i].lat, pert.nodes[i].lon});
    CHECK(geo::dist(a, b) <= 0.2 * 400.0 + 1e-6);
  }

  std::set<std::pair<std::uint32_t, std::uint32_t>> grid_edges;
  for (const auto& e : grid.edges)
    grid_edges.insert({std::min(e.a, e.b), std::max(e.a, e.b)});
  for (const auto& e : pert.edges)
    CHECK(grid_edges.count({std::min(e.a, e.b), std::max(e.a, e.b)}) == 1);
  CHECK(pert.edges.size() <= grid.edges.size());

  // bridge protection keeps the graph in one piece
  std::vector<std::vector<std::uint32_t>> adj(pert.nodes.size());
  for (const auto& e : pert.edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::vector<char> seen(pert.nodes.size(), 0);
  std::vector<std::uint32_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
  }
  CHECK(reached == pert.nodes.size());

  // same seed, same network, bit for bit
  const auto again = simgen::generate_network(
      simgen::NetworkKind::perturbed_grid, 5, 5, 400.0, kOrigin, 21);
  REQUIRE(again.nodes.size() == pert.nodes.size());
  for (std::size_t i = 0; i < pert.nodes.size(); ++i) {
    CHECK(again.nodes[i].lat == pert.nodes[i].lat);
    CHECK(again.nodes[i].lon == pert.nodes[i].lon);
  }
  CHECK(again.edges.size() == pert.edges.size());
}

TEST_CASE("a 1000 m edge at 15 m/s yields 67 evenly spaced waypoints") {
  const auto net = single_edge_1000m();
  const auto journeys = simgen::simulate_trajectories(net, 1, noiseless());
  REQUIRE(journeys.size() == 1);
  const auto& pts = journeys[0].points;
  REQUIRE(pts.size() == 67);

  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(*pts[i].speed_mps == 15.0);  // no hub, never slows
    if (i > 0) {
      CHECK(pts[i].t_ms - pts[i - 1].t_ms == 1000);
      const double step = oracles::haversine_m(pts[i - 1].lat, pts[i - 1].lon,
                                               pts[i].lat, pts[i].lon);
      CHECK(step == doctest::Approx(15.0).epsilon(1e-6));
    }
  }
  // first sample sits on whichever endpoint the walk started from
  const double from_a = oracles::haversine_m(pts[0].lat, pts[0].lon,
                                             net.nodes[0].lat, net.nodes[0].lon);
  const double from_b = oracles::haversine_m(pts[0].lat, pts[0].lon,
                                             net.nodes[1].lat, net.nodes[1].lon);
  CHECK(std::min(from_a, from_b) < 1e-6);
}

TEST_CASE("plus-shaped networks fall back to two-edge paths and slow at the hub") {
  const auto net = plus_network(400.0);
  const auto journeys = simgen::simulate_trajectories(net, 12, noiseless());
  REQUIRE(!journeys.empty());

  double min_speed = 1e9;
  for (const auto& j : journeys) {
    CHECK(j.points.size() >= 2);
    for (const auto& p : j.points) {
      REQUIRE(p.speed_mps.has_value());
      const double v = *p.speed_mps;
      CHECK((v == 15.0 || v == doctest::Approx(4.5).epsilon(1e-12)));
      min_speed = std::min(min_speed, v);
      const double d_hub = oracles::haversine_m(p.lat, p.lon, net.nodes[0].lat,
                                                net.nodes[0].lon);
      if (v < 15.0)
        CHECK(d_hub <= 40.0 + 0.05);
      else
        CHECK(d_hub >= 40.0 - 0.05);
    }
  }
  CHECK(min_speed == doctest::Approx(4.5).epsilon(1e-12));  // every path crosses the hub
}

TEST_CASE("speed labels stay on the profile even under position noise") {
  const auto net = plus_network(400.0);
  simgen::SimConfig cfg;  // default sigma 2 m
  cfg.seed = 5;
  const auto journeys = simgen::simulate_trajectories(net, 8, cfg);
  for (const auto& j : journeys)
    for (const auto& p : j.points)
      CHECK((*p.speed_mps == 15.0 ||
             *p.speed_mps == doctest::Approx(4.5).epsilon(1e-12)));
}

TEST_CASE("simulation is seed-deterministic") {
  const auto net = simgen::generate_network(simgen::NetworkKind::grid, 3, 3,
                                            400.0, kOrigin, 9);
  simgen::SimConfig cfg;
  cfg.seed = 123;
  const auto a = simgen::simulate_trajectories(net, 6, cfg);
  const auto b = simgen::simulate_trajectories(net, 6, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    REQUIRE(a[i].points.size() == b[i].points.size());
    for (std::size_t k = 0; k < a[i].points.size(); ++k) {
      CHECK(a[i].points[k].lat == b[i].points[k].lat);
      CHECK(a[i].points[k].lon == b[i].points[k].lon);
      CHECK(a[i].points[k].t_ms == b[i].points[k].t_ms);
    }
  }
  // journeys come out sorted by id, ids unique
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].id < a[i].id);

  cfg.seed = 124;
  const auto c = simgen::simulate_trajectories(net, 6, cfg);
  bool differs = c.size() != a.size();
  for (std::size_t i = 0; !differs && i < a.size(); ++i)
    differs = a[i].points.size() != c[i].points.size() ||
              a[i].points[0].lat != c[i].points[0].lat;
  CHECK(differs);
}

TEST_CASE("noiseless trajectories lie exactly on the network") {
  const auto net = simgen::generate_network(simgen::NetworkKind::grid, 3, 3,
                                            400.0, kOrigin, 2);
  const auto journeys = simgen::simulate_trajectories(net, 10, noiseless());
  std::size_t total = 0;
  for (const auto& j : journeys) total += j.points.size();

  auto kept = ingest::filter_to_reference(journeys, net, 1.0);
  CHECK(kept.dropped_points == 0);
  CHECK(kept.dropped_journeys == 0);
  std::size_t kept_total = 0;
  for (const auto& j : kept.journeys) kept_total += j.points.size();
  CHECK(kept_total == total);

  // oracle spot check on a sample of points
  std::size_t checked = 0;
  for (const auto& j : journeys) {
    for (std::size_t k = 0; k < j.points.size(); k += 17) {
      CHECK(oracles::min_dist_to_network_m(j.points[k], net) < 0.01);
      ++checked;
    }
    if (checked > 40) break;
  }
}

TEST_CASE("hub cells classify as intersections when the hub sits clear of cell edges") {
  // Nudge the origin so the grid's central hub lands on its cell's center;
  // a precision-8 cell is ~19 m tall, so an arbitrary origin can leave every
  // hub within a baseline length of some border.
  geo::LatLon origin = kOrigin;
  {
    const geo::LocalFrame f0(origin);
    const auto hub = f0.to_latlon({400.0, 400.0});
    const auto ctr = geohash::encode(hub.lat, hub.lon, 8).center();
    origin.lat += ctr.lat - hub.lat;
    origin.lon += ctr.lon - hub.lon;
  }
  const auto net = simgen::generate_network(simgen::NetworkKind::grid, 3, 3,
                                            400.0, origin, 3);
  auto cfg = noiseless();
  cfg.seed = 7;
  const auto journeys = simgen::simulate_trajectories(net, 60, cfg);
  const auto tiles = tiler::assign_tiles(journeys, 8);
  REQUIRE(!tiles.empty());

  const auto hubs = net.intersection_points();
  const auto labels = dataset::label_cells(tiles, hubs, 1);

  // margin of a hub inside its cell, in meters, against the nearest border
  const auto hub_margin = [](const geohash::GeoCell& cell, const geo::LatLon& p) {
    const double mlat = geo::kMetersPerDegLat;
    const double mlon =
        mlat * std::cos(cell.center().lat * geo::kDegToRad);
    return std::min(
        std::min((p.lat - cell.lat_min) * mlat, (cell.lat_max - p.lat) * mlat),
        std::min((p.lon - cell.lon_min) * mlon, (cell.lon_max - p.lon) * mlon));
  };

  int interior_hub_cells = 0;
  for (const auto& [code, label] : labels.labels) {
    const auto& clip = tiles.at(code);
    const auto pred = heuristic::classify(clip, 2.0, 30.0);

    if (pred.label == Label::intersection) {
      // no false positives on clean geometry: the cell must hold a hub
      CHECK(label == Label::intersection);
    }
    if (label == Label::intersection) {
      // hubs comfortably inside their cell must be caught; hubs within a
      // direction-baseline of the border can lose an arm to clipping
      for (const auto& h : hubs)
        if (clip.cell.contains(h.lat, h.lon) && hub_margin(clip.cell, h) > 9.0) {
          ++interior_hub_cells;
          CHECK(pred.label == Label::intersection);
        }
    }
  }
  CHECK(interior_hub_cells >= 1);
}

TEST_CASE("simulation input validation") {
  const auto net = single_edge_1000m();
  CHECK_THROWS_AS(simgen::simulate_trajectories(net, 0, noiseless()),
                  ConfigError);
  RoadNetwork empty;
  CHECK_THROWS_AS(simgen::simulate_trajectories(empty, 1, noiseless()),
                  ConfigError);
  auto bad = noiseless();
  bad.sample_interval_s = 0.0;
  CHECK_THROWS_AS(simgen::simulate_trajectories(net, 1, bad), ConfigError);
  bad = noiseless();
  bad.cruise_speed_mps = -3.0;
  CHECK_THROWS_AS(simgen::simulate_trajectories(net, 1, bad), ConfigError);
}

}  // TEST_SUITE
