#include "trajmap/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <string>
#include <string_view>

namespace trajmap::ingest {

namespace {

std::vector<std::string_view> split_fields(std::string_view line,
                                           std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& v) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, v);
  return ec == std::errc{} && p == last;
}

bool parse_i64(std::string_view s, std::int64_t& v) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, v);
  return ec == std::errc{} && p == last;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

LoadResult load_waypoints(std::istream& in) {
  if (!in) throw DataError("waypoint stream is not readable");

  std::string line;
  if (!std::getline(in, line)) throw DataError("waypoint stream has no header");

  std::vector<std::string_view> fields;
  split_fields(strip_cr(line), fields);

  int col_id = -1, col_t = -1, col_lat = -1, col_lon = -1, col_speed = -1;
  for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
    if (fields[i] == "journey_id") col_id = i;
    else if (fields[i] == "timestamp_ms") col_t = i;
    else if (fields[i] == "lat") col_lat = i;
    else if (fields[i] == "lon") col_lon = i;
    else if (fields[i] == "speed_mps") col_speed = i;
  }
  if (col_id < 0 || col_t < 0 || col_lat < 0 || col_lon < 0)
    throw DataError(
        "waypoint CSV header must name journey_id, timestamp_ms, lat, lon");

  LoadResult res;
  const int ncols = static_cast<int>(fields.size());
  while (std::getline(in, line)) {
    const auto row = strip_cr(line);
    if (row.empty()) continue;
    split_fields(row, fields);
    if (static_cast<int>(fields.size()) != ncols) {
      ++res.rejected;
      continue;
    }
    WayPoint wp;
    wp.journey_id = std::string(fields[col_id]);
    if (wp.journey_id.empty() || !parse_i64(fields[col_t], wp.t_ms) ||
        !parse_double(fields[col_lat], wp.lat) ||
        !parse_double(fields[col_lon], wp.lon)) {
      ++res.rejected;
      continue;
    }
    if (col_speed >= 0 && !fields[col_speed].empty()) {
      double s;
      if (!parse_double(fields[col_speed], s)) {
        ++res.rejected;
        continue;
      }
      wp.speed_mps = s;
    }
    if (!wp.valid()) {
      ++res.rejected;
      continue;
    }
    res.points.push_back(std::move(wp));
  }
  if (in.bad()) throw DataError("error while reading waypoint stream");
  return res;
}

BuildResult build_journeys(std::vector<WayPoint> points) {
  std::map<std::string, std::vector<WayPoint>> groups;
  for (auto& p : points) groups[p.journey_id].push_back(std::move(p));

  BuildResult res;
  for (auto& [id, pts] : groups) {
    std::sort(pts.begin(), pts.end(), [](const WayPoint& a, const WayPoint& b) {
      if (a.t_ms != b.t_ms) return a.t_ms < b.t_ms;
      if (a.lat != b.lat) return a.lat < b.lat;
      return a.lon < b.lon;
    });
    std::vector<WayPoint> dedup;
    dedup.reserve(pts.size());
    for (auto& p : pts) {
      if (!dedup.empty() && dedup.back().t_ms == p.t_ms) continue;
      dedup.push_back(std::move(p));
    }
    if (dedup.size() < 2) {
      ++res.dropped_groups;
      continue;
    }
    res.journeys.push_back(Journey{id, std::move(dedup)});
  }
  return res;  // std::map iteration already sorted by id
}

FilterResult filter_to_reference(std::vector<Journey> journeys,
                                 const RoadNetwork& network,
                                 double max_offset_m) {
  if (network.edges.empty()) throw ConfigError("reference network is empty");
  if (!(max_offset_m > 0.0)) throw ConfigError("max_offset must be positive");

  FilterResult res;
  for (auto& j : journeys) {
    std::vector<WayPoint> kept;
    kept.reserve(j.points.size());
    for (auto& p : j.points) {
      const geo::LocalFrame frame({p.lat, p.lon});
      double best = std::numeric_limits<double>::infinity();
      for (const auto& e : network.edges) {
        const auto& na = network.nodes[e.a];
        const auto& nb = network.nodes[e.b];
        const auto a = frame.to_xy({na.lat, na.lon});
        const auto b = frame.to_xy({nb.lat, nb.lon});
        best = std::min(best, geo::point_segment_dist({0.0, 0.0}, a, b));
        if (best <= max_offset_m) break;
      }
      if (best <= max_offset_m)
        kept.push_back(std::move(p));
      else
        ++res.dropped_points;
    }
    if (kept.size() < 2) {
      ++res.dropped_journeys;
      continue;
    }
    res.journeys.push_back(Journey{j.id, std::move(kept)});
  }
  return res;
}

}  // namespace trajmap::ingest
