#include "trajmap/geojson.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "trajmap/errors.hpp"

namespace trajmap::geojson {

using json = nlohmann::ordered_json;

std::string export_network(const RoadNetwork& net) {
  json features = json::array();
  for (const auto& e : net.edges) {
    const auto& a = net.nodes.at(e.a);
    const auto& b = net.nodes.at(e.b);
    json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "LineString"},
                     {"coordinates", {{a.lon, a.lat}, {b.lon, b.lat}}}};
    f["properties"] = json::object();
    features.push_back(std::move(f));
  }
  for (auto i : net.intersection_nodes()) {
    const auto& n = net.nodes[i];
    json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Point"}, {"coordinates", {n.lon, n.lat}}};
    f["properties"] = {{"role", "intersection"}};
    features.push_back(std::move(f));
  }
  json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = std::move(features);
  return fc.dump(2) + "\n";
}

NetworkFile load_network(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("network geojson parse error: ") + e.what());
  }
  if (doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array())
    throw DataError("network geojson is not a FeatureCollection");

  NetworkFile out;
  std::map<std::pair<double, double>, std::uint32_t> node_ids;
  const auto node_of = [&](double lon, double lat) {
    const auto key = std::make_pair(lon, lat);
    auto it = node_ids.find(key);
    if (it != node_ids.end()) return it->second;
    const auto idx = static_cast<std::uint32_t>(out.network.nodes.size());
    out.network.nodes.push_back(
        {static_cast<std::int64_t>(idx), lat, lon});
    node_ids.emplace(key, idx);
    return idx;
  };

  for (const auto& f : doc["features"]) {
    if (!f.contains("geometry") || f["geometry"].is_null()) continue;
    const auto& g = f["geometry"];
    const std::string type = g.value("type", "");
    if (type == "LineString") {
      const auto& coords = g.at("coordinates");
      if (!coords.is_array() || coords.size() < 2)
        throw DataError("LineString needs at least 2 positions");
      std::uint32_t prev = 0;
      bool have_prev = false;
      for (const auto& pos : coords) {
        if (!pos.is_array() || pos.size() < 2)
          throw DataError("bad position in LineString");
        const auto cur =
            node_of(pos[0].get<double>(), pos[1].get<double>());
        if (have_prev && cur != prev)
          out.network.edges.push_back({prev, cur});
        prev = cur;
        have_prev = true;
      }
    } else if (type == "Point") {
      const auto role =
          f.contains("properties") && f["properties"].is_object()
              ? f["properties"].value("role", "")
              : "";
      if (role == "intersection") {
        const auto& pos = g.at("coordinates");
        if (!pos.is_array() || pos.size() < 2)
          throw DataError("bad Point coordinates");
        out.intersections.push_back(
            {pos[1].get<double>(), pos[0].get<double>()});
      }
    }
  }
  if (out.intersections.empty())
    out.intersections = out.network.intersection_points();
  return out;
}

NetworkFile load_network_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return load_network(text);
}

std::string export_map(
    const std::vector<std::pair<geohash::GeoCell, Prediction>>& cells) {
  if (cells.empty()) throw DataError("no cells to export");
  auto sorted = cells;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.first.code < b.first.code;
  });

  json features = json::array();
  for (const auto& [cell, pred] : sorted) {
    const bool inter = pred.label == Label::intersection;
    json ring = json::array();
    ring.push_back({cell.lon_min, cell.lat_min});
    ring.push_back({cell.lon_max, cell.lat_min});
    ring.push_back({cell.lon_max, cell.lat_max});
    ring.push_back({cell.lon_min, cell.lat_max});
    ring.push_back({cell.lon_min, cell.lat_min});
    json f;
    f["type"] = "Feature";
    f["geometry"] = {{"type", "Polygon"},
                     {"coordinates", json::array({std::move(ring)})}};
    f["properties"] = {{"geohash", cell.code},
                       {"class", to_string(pred.label)},
                       {"score", pred.score},
                       {"color", inter ? "green" : "blue"}};
    features.push_back(std::move(f));
  }
  json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = std::move(features);
  return fc.dump(2) + "\n";
}

}  // namespace trajmap::geojson
