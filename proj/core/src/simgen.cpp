#include "trajmap/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

#include "trajmap/errors.hpp"
#include "trajmap/rng.hpp"

namespace trajmap::simgen {

namespace {

bool connected_without(const RoadNetwork& net, std::size_t skip_edge) {
  if (net.nodes.empty()) return true;
  std::vector<std::vector<std::uint32_t>> adj(net.nodes.size());
  for (std::size_t i = 0; i < net.edges.size(); ++i) {
    if (i == skip_edge) continue;
    adj[net.edges[i].a].push_back(net.edges[i].b);
    adj[net.edges[i].b].push_back(net.edges[i].a);
  }
  std::vector<char> seen(net.nodes.size(), 0);
  std::queue<std::uint32_t> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop();
    for (auto v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
  }
  return count == net.nodes.size();
}

}  // namespace

RoadNetwork generate_network(NetworkKind kind, int rows, int cols,
                             double spacing_m, geo::LatLon origin,
                             std::uint64_t seed) {
  if (rows < 2 || cols < 2) throw ConfigError("grid needs rows, cols >= 2");
  if (!(spacing_m > 0.0)) throw ConfigError("grid spacing must be positive");

  rng::Engine rng(rng::mix(seed, rng::hash_str("network")));
  const geo::LocalFrame frame(origin);

  RoadNetwork net;
  net.nodes.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double x = c * spacing_m;
      double y = r * spacing_m;
      if (kind == NetworkKind::perturbed_grid) {
        const double radius = 0.2 * spacing_m * rng.next_unit();
        const double theta = 2.0 * M_PI * rng.next_unit();
        x += radius * std::cos(theta);
        y += radius * std::sin(theta);
      }
      const auto p = frame.to_latlon({x, y});
      net.nodes.push_back({static_cast<std::int64_t>(net.nodes.size()),
                           p.lat, p.lon});
    }
  }
  const auto idx = [cols](int r, int c) {
    return static_cast<std::uint32_t>(r * cols + c);
  };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) net.edges.push_back({idx(r, c), idx(r, c + 1)});
      if (r + 1 < rows) net.edges.push_back({idx(r, c), idx(r + 1, c)});
    }

  if (kind == NetworkKind::perturbed_grid) {
    // Walk edges in a fixed order; a drawn edge is only removed while it
    // is not a bridge of the current graph.
    RoadNetwork pruned = net;
    std::size_t i = 0;
    while (i < pruned.edges.size()) {
      if (rng.next_unit() < 0.15 && connected_without(pruned, i)) {
        pruned.edges.erase(pruned.edges.begin() +
                           static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
    return pruned;
  }
  return net;
}

std::vector<Journey> simulate_trajectories(const RoadNetwork& network,
                                           int n_journeys,
                                           const SimConfig& config) {
  if (n_journeys < 1) throw ConfigError("n_journeys must be >= 1");
  if (network.nodes.empty() || network.edges.empty())
    throw ConfigError("network is empty");
  if (!(config.sample_interval_s > 0.0) || !(config.cruise_speed_mps > 0.0))
    throw ConfigError("sample interval and cruise speed must be positive");

  std::vector<std::vector<std::uint32_t>> adj(network.nodes.size());
  for (const auto& e : network.edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());

  double mean_lat = 0.0, mean_lon = 0.0;
  for (const auto& n : network.nodes) {
    mean_lat += n.lat;
    mean_lon += n.lon;
  }
  mean_lat /= static_cast<double>(network.nodes.size());
  mean_lon /= static_cast<double>(network.nodes.size());
  const geo::LocalFrame frame({mean_lat, mean_lon});

  std::vector<geo::XY> node_xy(network.nodes.size());
  for (std::size_t i = 0; i < network.nodes.size(); ++i)
    node_xy[i] = frame.to_xy({network.nodes[i].lat, network.nodes[i].lon});

  std::vector<geo::XY> slow_centers;
  for (auto i : network.intersection_nodes()) slow_centers.push_back(node_xy[i]);

  const auto profile_speed = [&](const geo::XY& p) {
    for (const auto& c : slow_centers)
      if (geo::dist(p, c) <= config.slow_radius_m)
        return config.cruise_speed_mps * config.slow_factor;
    return config.cruise_speed_mps;
  };

  constexpr int kMinEdges = 3;
  constexpr int kMaxAttempts = 200;
  const std::int64_t interval_ms =
      static_cast<std::int64_t>(std::llround(config.sample_interval_s * 1000.0));

  std::vector<Journey> journeys;
  journeys.reserve(static_cast<std::size_t>(n_journeys));
  for (int j = 0; j < n_journeys; ++j) {
    rng::Engine rng(rng::mix(config.seed, rng::mix(rng::hash_str("journey"),
                                                   static_cast<std::uint64_t>(j))));
    // Prefer simple paths of >= 3 edges; tiny networks (a single edge, a
    // plus) cannot host one, so fall back to the longest path seen.
    std::vector<std::uint32_t> path;
    std::vector<std::uint32_t> best;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      path.clear();
      const int target_edges = kMinEdges + static_cast<int>(rng.bounded(10));
      std::vector<char> visited(network.nodes.size(), 0);
      std::uint32_t cur =
          static_cast<std::uint32_t>(rng.bounded(network.nodes.size()));
      path.push_back(cur);
      visited[cur] = 1;
      while (static_cast<int>(path.size()) - 1 < target_edges) {
        std::vector<std::uint32_t> options;
        for (auto v : adj[cur])
          if (!visited[v]) options.push_back(v);
        if (options.empty()) break;
        cur = options[rng.bounded(options.size())];
        path.push_back(cur);
        visited[cur] = 1;
      }
      if (static_cast<int>(path.size()) - 1 >= kMinEdges) break;
      if (path.size() > best.size()) best = path;
      path.clear();
    }
    if (path.empty() && best.size() >= 2) path = std::move(best);
    if (path.empty())
      throw DataError("network has no traversable path");

    // Cumulative arc length along the path polyline.
    std::vector<double> cum{0.0};
    for (std::size_t i = 1; i < path.size(); ++i)
      cum.push_back(cum.back() + geo::dist(node_xy[path[i - 1]], node_xy[path[i]]));
    const double total = cum.back();

    const auto point_at = [&](double d) {
      std::size_t i = 1;
      while (i + 1 < cum.size() && cum[i] < d) ++i;
      const double seg = cum[i] - cum[i - 1];
      const double t = seg > 0.0 ? (d - cum[i - 1]) / seg : 0.0;
      const auto& a = node_xy[path[i - 1]];
      const auto& b = node_xy[path[i]];
      return geo::XY{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    };

    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "j%05d", j);
    Journey journey;
    journey.id = idbuf;

    const std::int64_t t0 =
        1600000000000LL + static_cast<std::int64_t>(j) * 1000000LL;
    double d = 0.0;
    int i = 0;
    while (d < total) {
      const auto pos = point_at(d);
      const double v = profile_speed(pos);
      WayPoint wp;
      wp.journey_id = journey.id;
      wp.t_ms = t0 + static_cast<std::int64_t>(i) * interval_ms;
      geo::XY noisy = pos;
      if (config.gps_noise_sigma_m > 0.0) {
        auto [gx, gy] = rng.gaussian_pair();
        noisy.x += gx * config.gps_noise_sigma_m;
        noisy.y += gy * config.gps_noise_sigma_m;
      }
      const auto ll = frame.to_latlon(noisy);
      wp.lat = ll.lat;
      wp.lon = ll.lon;
      wp.speed_mps = v;
      journey.points.push_back(std::move(wp));
      d += v * config.sample_interval_s;
      ++i;
    }
    if (journey.points.size() >= 2) journeys.push_back(std::move(journey));
  }

  std::sort(journeys.begin(), journeys.end(),
            [](const Journey& a, const Journey& b) { return a.id < b.id; });
  return journeys;
}

}  // namespace trajmap::simgen
