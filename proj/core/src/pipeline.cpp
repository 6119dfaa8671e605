#include "trajmap/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trajmap/dataset.hpp"
#include "trajmap/errors.hpp"
#include "trajmap/geojson.hpp"
#include "trajmap/heuristic.hpp"
#include "trajmap/ingest.hpp"
#include "trajmap/parallel.hpp"
#include "trajmap/png_io.hpp"
#include "trajmap/raster.hpp"
#include "trajmap/rng.hpp"
#include "trajmap/tiler.hpp"

namespace trajmap::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Shortest representation that parses back to the same double.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string path_in(const PipelineConfig& cfg, const char* name) {
  return (fs::path(cfg.out_dir) / name).string();
}

std::string network_path(const PipelineConfig& cfg) {
  return cfg.network.empty() ? path_in(cfg, "network.geojson") : cfg.network;
}

std::string journeys_path(const PipelineConfig& cfg) {
  return path_in(cfg, "journeys.csv");
}

void ensure_out_dir(const PipelineConfig& cfg) {
  std::error_code ec;
  fs::create_directories(fs::path(cfg.out_dir) / "tiles", ec);
  if (ec)
    throw DataError("cannot create output directory: " + cfg.out_dir);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw DataError("write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

void write_journeys_csv(const std::string& path,
                        const std::vector<Journey>& journeys) {
  std::ostringstream os;
  os << "journey_id,timestamp_ms,lat,lon,speed_mps\n";
  for (const auto& j : journeys)
    for (const auto& p : j.points) {
      os << p.journey_id << ',' << p.t_ms << ',' << num(p.lat) << ','
         << num(p.lon) << ',';
      if (p.speed_mps) os << num(*p.speed_mps);
      os << '\n';
    }
  write_text(path, os.str());
}

std::vector<Journey> read_journeys_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open: " + path);
  auto loaded = ingest::load_waypoints(f);
  return ingest::build_journeys(std::move(loaded.points)).journeys;
}

json chain_to_json(const tiler::Chain& chain) {
  json arr = json::array();
  for (const auto& v : chain) {
    json vertex = json::array({v.x, v.y});
    if (v.speed) vertex.push_back(*v.speed);
    else vertex.push_back(nullptr);
    arr.push_back(std::move(vertex));
  }
  return arr;
}

void write_clips(const std::string& path,
                 const std::map<std::string, tiler::TileClip>& tiles) {
  std::ostringstream os;
  for (const auto& [code, clip] : tiles) {
    json rec;
    rec["code"] = code;
    rec["point_count"] = clip.point_count;
    json chains = json::array();
    for (const auto& c : clip.segments) chains.push_back(chain_to_json(c));
    rec["chains"] = std::move(chains);
    os << rec.dump() << '\n';
  }
  write_text(path, os.str());
}

std::map<std::string, tiler::TileClip> read_clips(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open: " + path);
  std::map<std::string, tiler::TileClip> tiles;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    tiler::TileClip clip;
    const std::string code = rec.at("code").get<std::string>();
    clip.cell = geohash::cell_bounds(code);
    clip.point_count = rec.at("point_count").get<std::size_t>();
    for (const auto& cj : rec.at("chains")) {
      tiler::Chain chain;
      for (const auto& vj : cj) {
        tiler::ClipVertex v;
        v.x = vj.at(0).get<double>();
        v.y = vj.at(1).get<double>();
        if (!vj.at(2).is_null()) v.speed = vj.at(2).get<double>();
        chain.push_back(v);
      }
      clip.segments.push_back(std::move(chain));
    }
    tiles.emplace(code, std::move(clip));
  }
  return tiles;
}

void write_labels(const std::string& path,
                  const std::vector<std::pair<std::string, Label>>& labels) {
  std::ostringstream os;
  for (const auto& [code, label] : labels) {
    json rec;
    rec["code"] = code;
    rec["label"] = to_string(label);
    os << rec.dump() << '\n';
  }
  write_text(path, os.str());
}

std::vector<std::pair<std::string, Label>> read_labels(
    const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open: " + path);
  std::vector<std::pair<std::string, Label>> labels;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line, nullptr, true);
    labels.emplace_back(rec.at("code").get<std::string>(),
                        parse_label(rec.at("label").get<std::string>()));
  }
  if (labels.empty()) throw DataError("no labels in " + path);
  return labels;
}

struct Manifest {
  std::uint64_t split_seed = 0;
  std::uint64_t augment_seed = 0;
  int augment_k = 0;
  double test_fraction = 0.0;
  std::vector<std::string> train;
  std::vector<std::string> test;
};

void write_manifest(const std::string& path, const Manifest& m) {
  json doc;
  doc["split_seed"] = m.split_seed;
  doc["augment_seed"] = m.augment_seed;
  doc["augment_k"] = m.augment_k;
  doc["test_fraction"] = m.test_fraction;
  doc["train"] = m.train;
  doc["test"] = m.test;
  write_text(path, doc.dump(2) + "\n");
}

Manifest read_manifest(const std::string& path) {
  const json doc = json::parse(read_text(path));
  Manifest m;
  m.split_seed = doc.at("split_seed").get<std::uint64_t>();
  m.augment_seed = doc.at("augment_seed").get<std::uint64_t>();
  m.augment_k = doc.at("augment_k").get<int>();
  m.test_fraction = doc.at("test_fraction").get<double>();
  m.train = doc.at("train").get<std::vector<std::string>>();
  m.test = doc.at("test").get<std::vector<std::string>>();
  return m;
}

void write_predictions(
    const std::string& path,
    const std::vector<std::pair<std::string, Prediction>>& preds) {
  std::ostringstream os;
  for (const auto& [code, p] : preds) {
    json rec;
    rec["code"] = code;
    rec["label"] = to_string(p.label);
    rec["score"] = p.score;
    os << rec.dump() << '\n';
  }
  write_text(path, os.str());
}

std::vector<std::pair<std::string, Prediction>> read_predictions(
    const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open: " + path);
  std::vector<std::pair<std::string, Prediction>> preds;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    Prediction p;
    p.label = parse_label(rec.at("label").get<std::string>());
    p.score = rec.at("score").get<double>();
    preds.emplace_back(rec.at("code").get<std::string>(), p);
  }
  if (preds.empty()) throw DataError("no predictions in " + path);
  return preds;
}

raster::Mode mode_of(const PipelineConfig& cfg) {
  if (cfg.mode == "grayscale") return raster::Mode::grayscale;
  if (cfg.mode == "speed") return raster::Mode::speed;
  throw ConfigError("mode must be 'grayscale' or 'speed', got '" + cfg.mode +
                    "'");
}

simgen::NetworkKind kind_of(const SimSection& s) {
  if (s.kind == "grid") return simgen::NetworkKind::grid;
  if (s.kind == "perturbed-grid") return simgen::NetworkKind::perturbed_grid;
  throw ConfigError("simulate.kind must be 'grid' or 'perturbed-grid', got '" +
                    s.kind + "'");
}

std::uint64_t stage_seed(const PipelineConfig& cfg, const char* stage) {
  return rng::mix(cfg.seed, rng::hash_str(stage));
}

dataset::TileSample load_sample(const PipelineConfig& cfg,
                                const std::string& code, Label label) {
  dataset::TileSample s;
  s.code = code;
  s.label = label;
  s.provenance = dataset::Provenance::original;
  s.raster = png::read_file(
      (fs::path(cfg.out_dir) / "tiles" / (code + ".png")).string());
  return s;
}

void require_file(const std::string& path, const char* what) {
  if (!fs::exists(path))
    throw ConfigError(std::string(what) + " does not exist: " + path);
}

}  // namespace

// --- configuration ---------------------------------------------------------

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> known,
                const char* where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : known)
      if (key == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError(std::string("unknown config key '") + key + "' in " +
                        where);
  }
}

}  // namespace

PipelineConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  check_keys(doc,
             {"precision", "raster_size", "mode", "v_max", "line_width",
              "min_points", "test_fraction", "augment_k", "train", "threshold",
              "classifier", "snap_m", "min_branch_deg", "filter_offset_m",
              "eval_scope", "reference", "seed", "workers", "simulate",
              "input_csv", "network", "out_dir"},
             "config");

  PipelineConfig cfg;
  try {
    cfg.precision = doc.value("precision", cfg.precision);
    cfg.raster_size = doc.value("raster_size", cfg.raster_size);
    cfg.mode = doc.value("mode", cfg.mode);
    cfg.v_max = doc.value("v_max", cfg.v_max);
    cfg.line_width = doc.value("line_width", cfg.line_width);
    cfg.min_points = doc.value("min_points", cfg.min_points);
    cfg.test_fraction = doc.value("test_fraction", cfg.test_fraction);
    cfg.augment_k = doc.value("augment_k", cfg.augment_k);
    cfg.threshold = doc.value("threshold", cfg.threshold);
    cfg.classifier = doc.value("classifier", cfg.classifier);
    cfg.snap_m = doc.value("snap_m", cfg.snap_m);
    cfg.min_branch_deg = doc.value("min_branch_deg", cfg.min_branch_deg);
    if (doc.contains("filter_offset_m") && !doc["filter_offset_m"].is_null())
      cfg.filter_offset_m = doc["filter_offset_m"].get<double>();
    cfg.eval_scope = doc.value("eval_scope", cfg.eval_scope);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.workers = doc.value("workers", cfg.workers);
    cfg.input_csv = doc.value("input_csv", cfg.input_csv);
    cfg.network = doc.value("network", cfg.network);
    cfg.out_dir = doc.value("out_dir", cfg.out_dir);

    if (doc.contains("train")) {
      const auto& t = doc["train"];
      check_keys(t, {"epochs", "batch", "learning_rate", "momentum",
                     "input_size"},
                 "train");
      cfg.train.epochs = t.value("epochs", cfg.train.epochs);
      cfg.train.batch = t.value("batch", cfg.train.batch);
      cfg.train.learning_rate =
          t.value("learning_rate", cfg.train.learning_rate);
      cfg.train.momentum = t.value("momentum", cfg.train.momentum);
      cfg.train.input_size = t.value("input_size", cfg.train.input_size);
    }
    if (doc.contains("simulate")) {
      const auto& s = doc["simulate"];
      check_keys(s,
                 {"kind", "rows", "cols", "spacing_m", "origin_lat",
                  "origin_lon", "n_journeys", "sample_interval_s",
                  "cruise_speed_mps", "slow_factor", "slow_radius_m",
                  "gps_noise_sigma_m"},
                 "simulate");
      auto& sim = cfg.simulate;
      sim.kind = s.value("kind", sim.kind);
      sim.rows = s.value("rows", sim.rows);
      sim.cols = s.value("cols", sim.cols);
      sim.spacing_m = s.value("spacing_m", sim.spacing_m);
      sim.origin_lat = s.value("origin_lat", sim.origin_lat);
      sim.origin_lon = s.value("origin_lon", sim.origin_lon);
      sim.n_journeys = s.value("n_journeys", sim.n_journeys);
      sim.sample_interval_s =
          s.value("sample_interval_s", sim.sample_interval_s);
      sim.cruise_speed_mps = s.value("cruise_speed_mps", sim.cruise_speed_mps);
      sim.slow_factor = s.value("slow_factor", sim.slow_factor);
      sim.slow_radius_m = s.value("slow_radius_m", sim.slow_radius_m);
      sim.gps_noise_sigma_m =
          s.value("gps_noise_sigma_m", sim.gps_noise_sigma_m);
    }
    if (doc.contains("reference")) {
      const auto& r = doc["reference"];
      if (!r.is_object())
        throw ConfigError("reference must map report fields to numbers");
      for (const auto& [field, value] : r.items())
        cfg.reference.push_back({field, value.get<double>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return cfg;
}

PipelineConfig load_config_file(const std::string& path) {
  if (!fs::exists(path))
    throw ConfigError("config file does not exist: " + path);
  return config_from_json(read_text(path));
}

std::string config_to_json(const PipelineConfig& cfg) {
  json doc;
  doc["precision"] = cfg.precision;
  doc["raster_size"] = cfg.raster_size;
  doc["mode"] = cfg.mode;
  doc["v_max"] = cfg.v_max;
  doc["line_width"] = cfg.line_width;
  doc["min_points"] = cfg.min_points;
  doc["test_fraction"] = cfg.test_fraction;
  doc["augment_k"] = cfg.augment_k;
  doc["train"] = {{"epochs", cfg.train.epochs},
                  {"batch", cfg.train.batch},
                  {"learning_rate", cfg.train.learning_rate},
                  {"momentum", cfg.train.momentum},
                  {"input_size", cfg.train.input_size}};
  doc["threshold"] = cfg.threshold;
  doc["classifier"] = cfg.classifier;
  doc["snap_m"] = cfg.snap_m;
  doc["min_branch_deg"] = cfg.min_branch_deg;
  if (cfg.filter_offset_m)
    doc["filter_offset_m"] = *cfg.filter_offset_m;
  else
    doc["filter_offset_m"] = nullptr;
  doc["eval_scope"] = cfg.eval_scope;
  if (!cfg.reference.empty()) {
    json r = json::object();
    for (const auto& e : cfg.reference) r[e.field] = e.value;
    doc["reference"] = std::move(r);
  }
  doc["seed"] = cfg.seed;
  doc["workers"] = cfg.workers;
  doc["simulate"] = {{"kind", cfg.simulate.kind},
                     {"rows", cfg.simulate.rows},
                     {"cols", cfg.simulate.cols},
                     {"spacing_m", cfg.simulate.spacing_m},
                     {"origin_lat", cfg.simulate.origin_lat},
                     {"origin_lon", cfg.simulate.origin_lon},
                     {"n_journeys", cfg.simulate.n_journeys},
                     {"sample_interval_s", cfg.simulate.sample_interval_s},
                     {"cruise_speed_mps", cfg.simulate.cruise_speed_mps},
                     {"slow_factor", cfg.simulate.slow_factor},
                     {"slow_radius_m", cfg.simulate.slow_radius_m},
                     {"gps_noise_sigma_m", cfg.simulate.gps_noise_sigma_m}};
  doc["input_csv"] = cfg.input_csv;
  doc["network"] = cfg.network;
  doc["out_dir"] = cfg.out_dir;
  return doc.dump(2) + "\n";
}

// --- stages -----------------------------------------------------------------

SimulateOut stage_simulate(const PipelineConfig& cfg) {
  ensure_out_dir(cfg);
  const auto seed = stage_seed(cfg, "simulate");
  const auto& s = cfg.simulate;
  const auto net = simgen::generate_network(
      kind_of(s), s.rows, s.cols, s.spacing_m,
      geo::LatLon{s.origin_lat, s.origin_lon}, seed);
  simgen::SimConfig sc;
  sc.sample_interval_s = s.sample_interval_s;
  sc.cruise_speed_mps = s.cruise_speed_mps;
  sc.slow_factor = s.slow_factor;
  sc.slow_radius_m = s.slow_radius_m;
  sc.gps_noise_sigma_m = s.gps_noise_sigma_m;
  sc.seed = seed;
  const auto journeys = simgen::simulate_trajectories(net, s.n_journeys, sc);

  write_text(path_in(cfg, "network.geojson"), geojson::export_network(net));
  write_journeys_csv(journeys_path(cfg), journeys);

  SimulateOut out;
  out.nodes = net.nodes.size();
  out.edges = net.edges.size();
  out.intersections = net.intersection_nodes().size();
  out.journeys = journeys.size();
  for (const auto& j : journeys) out.waypoints += j.points.size();
  return out;
}

IngestOut stage_ingest(const PipelineConfig& cfg) {
  ensure_out_dir(cfg);
  const std::string src =
      cfg.input_csv.empty() ? journeys_path(cfg) : cfg.input_csv;
  require_file(src, "input_csv");

  std::ifstream f(src);
  if (!f) throw DataError("cannot open: " + src);
  auto loaded = ingest::load_waypoints(f);
  IngestOut out;
  out.rows = loaded.points.size() + loaded.rejected;
  out.rejected = loaded.rejected;

  auto built = ingest::build_journeys(std::move(loaded.points));
  out.dropped_groups = built.dropped_groups;
  auto journeys = std::move(built.journeys);

  if (cfg.filter_offset_m) {
    const auto nf = geojson::load_network_file(network_path(cfg));
    auto filtered = ingest::filter_to_reference(std::move(journeys),
                                                nf.network,
                                                *cfg.filter_offset_m);
    out.filtered_points = filtered.dropped_points;
    out.filtered_journeys = filtered.dropped_journeys;
    journeys = std::move(filtered.journeys);
  }

  out.journeys = journeys.size();
  for (const auto& j : journeys) out.waypoints += j.points.size();
  write_journeys_csv(journeys_path(cfg), journeys);
  return out;
}

TileOut stage_tile(const PipelineConfig& cfg) {
  ensure_out_dir(cfg);
  const auto journeys = read_journeys_csv(journeys_path(cfg));
  const auto tiles = tiler::assign_tiles(journeys, cfg.precision);

  write_clips(path_in(cfg, "clips.jsonl"), tiles);

  std::ostringstream os;
  TileOut out;
  out.cells = tiles.size();
  for (const auto& [code, clip] : tiles) {
    out.chains += clip.segments.size();
    out.cell_points += clip.point_count;
    json rec;
    rec["code"] = code;
    rec["point_count"] = clip.point_count;
    rec["chain_count"] = clip.segments.size();
    rec["bbox"] = {clip.cell.lon_min, clip.cell.lat_min, clip.cell.lon_max,
                   clip.cell.lat_max};
    os << rec.dump() << '\n';
  }
  write_text(path_in(cfg, "tiles.jsonl"), os.str());
  return out;
}

RenderOut stage_render(const PipelineConfig& cfg) {
  ensure_out_dir(cfg);
  const auto tiles = read_clips(path_in(cfg, "clips.jsonl"));
  const auto mode = mode_of(cfg);

  std::vector<const tiler::TileClip*> clips;
  clips.reserve(tiles.size());
  for (const auto& [code, clip] : tiles) clips.push_back(&clip);

  par::for_each_index(clips.size(), cfg.workers, [&](std::size_t i) {
    const auto& clip = *clips[i];
    const auto img =
        raster::render_tile(clip, cfg.raster_size, mode, cfg.v_max,
                            cfg.line_width);
    png::write_file(img, (fs::path(cfg.out_dir) / "tiles" /
                          (clip.cell.code + ".png"))
                             .string());
  });
  return RenderOut{tiles.size()};
}

LabelOut stage_label(const PipelineConfig& cfg) {
  ensure_out_dir(cfg);
  const auto tiles = read_clips(path_in(cfg, "clips.jsonl"));
  const auto nf = geojson::load_network_file(network_path(cfg));
  const auto result =
      dataset::label_cells(tiles, nf.intersections, cfg.min_points);

  write_labels(path_in(cfg, "labels.jsonl"), result.labels);

  LabelOut out;
  out.labeled = result.labels.size();
  out.excluded_sparse = result.excluded_sparse;
  for (const auto& [code, label] : result.labels)
    ++(label == Label::intersection ? out.intersections : out.straights);
  return out;
}

SplitOut stage_split(const PipelineConfig& cfg) {
  ensure_out_dir(cfg);
  const auto labels = read_labels(path_in(cfg, "labels.jsonl"));

  // Membership is decided by codes and labels alone; rasters stay on disk.
  std::vector<dataset::TileSample> samples;
  samples.reserve(labels.size());
  for (const auto& [code, label] : labels) {
    dataset::TileSample s;
    s.code = code;
    s.label = label;
    samples.push_back(std::move(s));
  }
  const auto split =
      dataset::split_dataset(samples, cfg.test_fraction, stage_seed(cfg, "split"));

  Manifest m;
  m.split_seed = stage_seed(cfg, "split");
  m.augment_seed = stage_seed(cfg, "augment");
  m.augment_k = cfg.augment_k;
  m.test_fraction = cfg.test_fraction;
  SplitOut out;
  for (const auto& s : split.train) {
    m.train.push_back(s.code);
    ++out.train_by_class[static_cast<int>(s.label)];
  }
  for (const auto& s : split.test) {
    m.test.push_back(s.code);
    ++out.test_by_class[static_cast<int>(s.label)];
  }
  out.train_total = split.train.size();
  out.test_total = split.test.size();
  write_manifest(path_in(cfg, "dataset.json"), m);
  return out;
}

TrainOut stage_train(const PipelineConfig& cfg) {
  ensure_out_dir(cfg);
  const auto labels = read_labels(path_in(cfg, "labels.jsonl"));
  const auto manifest = read_manifest(path_in(cfg, "dataset.json"));

  std::map<std::string, Label> by_code(labels.begin(), labels.end());
  std::vector<dataset::TileSample> originals;
  originals.reserve(manifest.train.size());
  for (const auto& code : manifest.train) {
    const auto it = by_code.find(code);
    if (it == by_code.end())
      throw DataError("manifest code missing from labels: " + code);
    originals.push_back(load_sample(cfg, code, it->second));
  }

  std::vector<dataset::TileSample> train = originals;
  TrainOut out;
  out.originals = originals.size();
  for (const auto& s : originals) {
    auto variants = dataset::augment(s, manifest.augment_k,
                                     manifest.augment_seed);
    out.augmented += variants.size();
    for (auto& v : variants) train.push_back(std::move(v));
  }

  model::TrainConfig tc = cfg.train;
  tc.seed = stage_seed(cfg, "train");
  const auto result =
      model::train_model(train, tc, par::resolve_workers(cfg.workers));

  model::save_file(result.model, path_in(cfg, "model.bin"));
  json loss;
  loss["epoch_mean_loss"] = result.loss_curve;
  write_text(path_in(cfg, "loss.json"), loss.dump(2) + "\n");

  out.epochs = tc.epochs;
  out.first_loss = result.loss_curve.front();
  out.final_loss = result.loss_curve.back();
  return out;
}

ClassifyOut stage_classify(const PipelineConfig& cfg) {
  ensure_out_dir(cfg);
  const auto labels = read_labels(path_in(cfg, "labels.jsonl"));

  std::vector<std::pair<std::string, Prediction>> preds(labels.size());
  if (cfg.classifier == "cnn") {
    const auto m = model::load_file(path_in(cfg, "model.bin"));
    par::for_each_index(labels.size(), cfg.workers, [&](std::size_t i) {
      const auto& code = labels[i].first;
      const auto img = png::read_file(
          (fs::path(cfg.out_dir) / "tiles" / (code + ".png")).string());
      preds[i] = {code, model::predict(m, img, cfg.threshold)};
    });
  } else if (cfg.classifier == "heuristic") {
    const auto tiles = read_clips(path_in(cfg, "clips.jsonl"));
    par::for_each_index(labels.size(), cfg.workers, [&](std::size_t i) {
      const auto& code = labels[i].first;
      const auto it = tiles.find(code);
      if (it == tiles.end())
        throw DataError("labeled code missing from clips: " + code);
      preds[i] = {code, heuristic::classify(it->second, cfg.snap_m,
                                            cfg.min_branch_deg)};
    });
  } else {
    throw ConfigError("classifier must be 'cnn' or 'heuristic', got '" +
                      cfg.classifier + "'");
  }

  write_predictions(path_in(cfg, "predictions.jsonl"), preds);
  ClassifyOut out;
  out.predicted = preds.size();
  for (const auto& [code, p] : preds)
    ++(p.label == Label::intersection ? out.intersections : out.straights);
  return out;
}

EvaluateOut stage_evaluate(const PipelineConfig& cfg) {
  ensure_out_dir(cfg);
  const auto labels = read_labels(path_in(cfg, "labels.jsonl"));
  const auto preds = read_predictions(path_in(cfg, "predictions.jsonl"));
  std::map<std::string, Prediction> by_code;
  for (const auto& [code, p] : preds) by_code.emplace(code, p);

  std::vector<std::string> scope_codes;
  if (cfg.eval_scope == "test") {
    scope_codes = read_manifest(path_in(cfg, "dataset.json")).test;
  } else if (cfg.eval_scope == "all") {
    for (const auto& [code, label] : labels) scope_codes.push_back(code);
  } else {
    throw ConfigError("eval_scope must be 'test' or 'all', got '" +
                      cfg.eval_scope + "'");
  }
  std::sort(scope_codes.begin(), scope_codes.end());

  std::map<std::string, Label> actual(labels.begin(), labels.end());
  std::vector<std::pair<Label, Label>> pairs;
  pairs.reserve(scope_codes.size());
  for (const auto& code : scope_codes) {
    const auto ai = actual.find(code);
    const auto pi = by_code.find(code);
    if (ai == actual.end())
      throw DataError("evaluation code missing from labels: " + code);
    if (pi == by_code.end())
      throw DataError("evaluation code missing from predictions: " + code);
    pairs.emplace_back(ai->second, pi->second.label);
  }

  const auto cm = metrics::confusion(pairs);
  auto rep = metrics::report(cm);
  for (auto& flag : metrics::compare_to_reference(rep, cfg.reference))
    rep.flags.push_back(std::move(flag));

  json doc;
  doc["classes"] = json::object();
  const char* names[2] = {"intersection", "straight"};
  for (int c = 0; c < 2; ++c) {
    const auto& m = rep.per_class[c];
    doc["classes"][names[c]] = {{"precision", m.precision},
                                {"recall", m.recall},
                                {"f1", m.f1},
                                {"support", m.support}};
  }
  doc["accuracy"] = rep.accuracy;
  doc["macro_avg"] = {{"precision", rep.macro_avg.precision},
                      {"recall", rep.macro_avg.recall},
                      {"f1", rep.macro_avg.f1}};
  doc["weighted_avg"] = {{"precision", rep.weighted_avg.precision},
                         {"recall", rep.weighted_avg.recall},
                         {"f1", rep.weighted_avg.f1}};
  doc["total"] = rep.total;
  doc["confusion"] = {{cm.counts[0][0], cm.counts[0][1]},
                      {cm.counts[1][0], cm.counts[1][1]}};
  doc["flags"] = rep.flags;
  write_text(path_in(cfg, "report.json"), doc.dump(2) + "\n");

  std::ostringstream csv;
  csv << "actual,predicted,count\n";
  for (int a = 0; a < 2; ++a)
    for (int p = 0; p < 2; ++p)
      csv << names[a] << ',' << names[p] << ',' << cm.counts[a][p] << '\n';
  write_text(path_in(cfg, "confusion.csv"), csv.str());

  EvaluateOut out;
  out.evaluated = pairs.size();
  out.report = std::move(rep);
  return out;
}

MapOut stage_map(const PipelineConfig& cfg) {
  ensure_out_dir(cfg);
  const auto preds = read_predictions(path_in(cfg, "predictions.jsonl"));
  std::vector<std::pair<geohash::GeoCell, Prediction>> cells;
  cells.reserve(preds.size());
  for (const auto& [code, p] : preds)
    cells.emplace_back(geohash::cell_bounds(code), p);
  write_text(path_in(cfg, "map.geojson"), geojson::export_map(cells));
  return MapOut{cells.size()};
}

// --- full run ---------------------------------------------------------------

std::string run_pipeline(const PipelineConfig& cfg) {
  // Validate referenced inputs before any work.
  if (!cfg.input_csv.empty()) require_file(cfg.input_csv, "input_csv");
  if (!cfg.network.empty()) require_file(cfg.network, "network");
  if (cfg.input_csv.empty() && cfg.simulate.n_journeys < 1)
    throw ConfigError("no input_csv and nothing to simulate");

  ensure_out_dir(cfg);
  json stages;

  if (cfg.input_csv.empty()) {
    const auto s = stage_simulate(cfg);
    stages["simulate"] = {{"nodes", s.nodes},
                          {"edges", s.edges},
                          {"intersections", s.intersections},
                          {"journeys", s.journeys},
                          {"waypoints", s.waypoints}};
  }

  const auto ing = stage_ingest(cfg);
  stages["ingest"] = {{"rows", ing.rows},
                      {"rejected", ing.rejected},
                      {"journeys", ing.journeys},
                      {"dropped_groups", ing.dropped_groups},
                      {"filtered_points", ing.filtered_points},
                      {"filtered_journeys", ing.filtered_journeys},
                      {"waypoints", ing.waypoints}};

  const auto til = stage_tile(cfg);
  stages["tile"] = {{"cells", til.cells},
                    {"chains", til.chains},
                    {"cell_points", til.cell_points}};

  const auto ren = stage_render(cfg);
  stages["render"] = {{"tiles", ren.tiles}};

  const auto lab = stage_label(cfg);
  stages["label"] = {{"labeled", lab.labeled},
                     {"excluded_sparse", lab.excluded_sparse},
                     {"intersections", lab.intersections},
                     {"straights", lab.straights}};

  const auto spl = stage_split(cfg);
  stages["split"] = {{"train", spl.train_total},
                     {"test", spl.test_total},
                     {"train_intersections", spl.train_by_class[0]},
                     {"train_straights", spl.train_by_class[1]},
                     {"test_intersections", spl.test_by_class[0]},
                     {"test_straights", spl.test_by_class[1]}};

  if (cfg.classifier == "cnn") {
    const auto tr = stage_train(cfg);
    stages["train"] = {{"originals", tr.originals},
                       {"augmented", tr.augmented},
                       {"epochs", tr.epochs},
                       {"first_loss", tr.first_loss},
                       {"final_loss", tr.final_loss}};
  }

  const auto cls = stage_classify(cfg);
  stages["classify"] = {{"predicted", cls.predicted},
                        {"intersections", cls.intersections},
                        {"straights", cls.straights}};

  const auto ev = stage_evaluate(cfg);
  stages["evaluate"] = {{"evaluated", ev.evaluated},
                        {"accuracy", ev.report.accuracy}};

  const auto mp = stage_map(cfg);
  stages["map"] = {{"features", mp.features}};

  json summary;
  summary["config"] = json::parse(config_to_json(cfg));
  summary["stages"] = std::move(stages);
  json artifacts;
  artifacts["report"] = "report.json";
  artifacts["map"] = "map.geojson";
  artifacts["labels"] = "labels.jsonl";
  artifacts["predictions"] = "predictions.jsonl";
  if (cfg.classifier == "cnn") artifacts["model"] = "model.bin";
  artifacts["tiles_dir"] = "tiles";
  summary["artifacts"] = std::move(artifacts);

  const std::string text = summary.dump(2) + "\n";
  write_text(path_in(cfg, "summary.json"), text);
  return text;
}

}  // namespace trajmap::pipeline
