#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "trajmap/errors.hpp"
#include "trajmap/geohash.hpp"
#include "trajmap/pipeline.hpp"
#include "trajmap/png_io.hpp"
#include "trajmap/raster.hpp"

using namespace trajmap;
namespace fs = std::filesystem;
using njson = nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() /
                       ("trajmap_pipe_" + std::to_string(getpid()) + "_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  return std::string((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  REQUIRE(f.good());
  f << text;
}

// Relative path -> bytes, for whole-tree determinism checks.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file())
      files[fs::relative(e.path(), dir).string()] = read_file(e.path());
  return files;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

// Small enough to finish in seconds: a noise-free 3x3 grid with the
// geometric classifier, so no training is involved.
pipeline::PipelineConfig small_cfg(const fs::path& out) {
  pipeline::PipelineConfig cfg;
  cfg.precision = 8;
  cfg.raster_size = 64;
  cfg.mode = "grayscale";
  cfg.line_width = 1;
  cfg.min_points = 3;
  cfg.test_fraction = 0.2;
  cfg.augment_k = 0;
  cfg.classifier = "heuristic";
  cfg.snap_m = 2.0;
  cfg.min_branch_deg = 45.0;
  cfg.eval_scope = "all";
  cfg.seed = 42;
  cfg.workers = 0;
  cfg.simulate.kind = "grid";
  cfg.simulate.rows = 3;
  cfg.simulate.cols = 3;
  cfg.simulate.spacing_m = 400.0;
  cfg.simulate.n_journeys = 24;
  cfg.simulate.gps_noise_sigma_m = 0.0;
  cfg.out_dir = out.string();
  return cfg;
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string("\"") + TRAJMAP_TOOL_PATH + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

raster::TileRaster blank16() {
  raster::TileRaster r;
  r.width = 16;
  r.height = 16;
  r.channels = 1;
  r.pixels.assign(16 * 16, 255);
  return r;
}

// labels + manifest + tile images, enough for the train stage alone.
void write_train_fixture(const fs::path& dir) {
  fs::create_directories(dir / "tiles");
  const std::string a = geohash::encode(40.0, -88.0, 8).code;
  const std::string b = geohash::encode(40.01, -88.01, 8).code;

  write_file(dir / "labels.jsonl",
             "{\"code\":\"" + a + "\",\"label\":\"intersection\"}\n" +
                 "{\"code\":\"" + b + "\",\"label\":\"straight\"}\n");
  write_file(dir / "dataset.json",
             "{\"split_seed\":1,\"augment_seed\":2,\"augment_k\":0,"
             "\"test_fraction\":0.2,\"train\":[\"" +
                 a + "\",\"" + b + "\"],\"test\":[]}\n");

  auto cross = blank16();
  for (int i = 2; i < 14; ++i) {
    cross.pixels[cross.index(8, i)] = 0;
    cross.pixels[cross.index(i, 8)] = 0;
  }
  auto line = blank16();
  for (int i = 0; i < 16; ++i) line.pixels[line.index(8, i)] = 0;
  png::write_file(cross, (dir / "tiles" / (a + ".png")).string());
  png::write_file(line, (dir / "tiles" / (b + ".png")).string());
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("default config survives a json round trip") {
  const pipeline::PipelineConfig def;
  const std::string text = pipeline::config_to_json(def);
  const auto parsed = pipeline::config_from_json(text);
  CHECK(pipeline::config_to_json(parsed) == text);

  CHECK(parsed.precision == 8);
  CHECK(parsed.raster_size == 640);
  CHECK(parsed.mode == "speed");
  CHECK(parsed.v_max == 35.0);
  CHECK(parsed.line_width == 2);
  CHECK(parsed.min_points == 5);
  CHECK(parsed.test_fraction == doctest::Approx(0.10));
  CHECK(parsed.augment_k == 2);
  CHECK(parsed.train.epochs == 30);
  CHECK(parsed.train.input_size == 64);
  CHECK(parsed.threshold == 0.5);
  CHECK(parsed.classifier == "cnn");
  CHECK(parsed.eval_scope == "test");
  CHECK(parsed.seed == 42);
  CHECK(parsed.workers == 0);
  CHECK(parsed.simulate.kind == "perturbed-grid");
  CHECK(parsed.simulate.rows == 5);
  CHECK(parsed.simulate.n_journeys == 200);
  CHECK(parsed.out_dir == "out");
  CHECK_FALSE(parsed.filter_offset_m.has_value());
  CHECK(parsed.reference.empty());
}

TEST_CASE("explicit settings survive a json round trip") {
  pipeline::PipelineConfig cfg;
  cfg.precision = 7;
  cfg.raster_size = 128;
  cfg.mode = "grayscale";
  cfg.v_max = 28.0;
  cfg.line_width = 3;
  cfg.min_points = 9;
  cfg.test_fraction = 0.25;
  cfg.augment_k = 4;
  cfg.train.epochs = 12;
  cfg.train.batch = 8;
  cfg.train.learning_rate = 0.005;
  cfg.train.momentum = 0.8;
  cfg.train.input_size = 32;
  cfg.threshold = 0.6;
  cfg.classifier = "heuristic";
  cfg.snap_m = 1.5;
  cfg.min_branch_deg = 40.0;
  cfg.filter_offset_m = 25.0;
  cfg.eval_scope = "all";
  cfg.reference.push_back({"accuracy", 0.95});
  cfg.reference.push_back({"weighted_avg.f1", 0.93});
  cfg.seed = 7;
  cfg.workers = 2;
  cfg.simulate.kind = "grid";
  cfg.simulate.rows = 4;
  cfg.simulate.cols = 6;
  cfg.simulate.n_journeys = 50;
  cfg.simulate.gps_noise_sigma_m = 0.0;
  cfg.input_csv = "points.csv";
  cfg.network = "net.geojson";
  cfg.out_dir = "elsewhere";

  const std::string text = pipeline::config_to_json(cfg);
  const auto parsed = pipeline::config_from_json(text);
  CHECK(pipeline::config_to_json(parsed) == text);

  REQUIRE(parsed.filter_offset_m.has_value());
  CHECK(*parsed.filter_offset_m == 25.0);
  REQUIRE(parsed.reference.size() == 2);
  CHECK(parsed.reference[0].field == "accuracy");
  CHECK(parsed.reference[1].field == "weighted_avg.f1");
  CHECK(parsed.reference[1].value == 0.93);
  CHECK(parsed.train.learning_rate == 0.005);
  CHECK(parsed.simulate.cols == 6);
  CHECK(parsed.input_csv == "points.csv");
  CHECK(parsed.network == "net.geojson");
}

TEST_CASE("config parsing rejects unknown keys and malformed documents") {
  CHECK_THROWS_WITH_AS(pipeline::config_from_json("{\"bogus\": 1}"),
                       "unknown config key 'bogus' in config", ConfigError);
  CHECK_THROWS_AS(
      pipeline::config_from_json("{\"train\": {\"bogus\": 1}}"), ConfigError);
  CHECK_THROWS_AS(
      pipeline::config_from_json("{\"simulate\": {\"rows\": 3, \"x\": 1}}"),
      ConfigError);
  CHECK_THROWS_WITH_AS(pipeline::config_from_json("[1, 2]"),
                       "config must be a JSON object", ConfigError);
  CHECK_THROWS_AS(pipeline::config_from_json("not json"), ConfigError);
  CHECK_THROWS_AS(pipeline::config_from_json("{\"precision\": \"eight\"}"),
                  ConfigError);
  CHECK_THROWS_AS(pipeline::config_from_json("{\"reference\": [1]}"),
                  ConfigError);
}

TEST_CASE("config file loading") {
  const auto dir = fresh_dir("cfgfile");
  const auto path = dir / "cfg.json";

  const std::string missing = (dir / "absent.json").string();
  CHECK_THROWS_WITH_AS(pipeline::load_config_file(missing),
                       ("config file does not exist: " + missing).c_str(),
                       ConfigError);

  write_file(path, "{\"precision\": 7, \"classifier\": \"heuristic\"}\n");
  const auto cfg = pipeline::load_config_file(path.string());
  CHECK(cfg.precision == 7);
  CHECK(cfg.classifier == "heuristic");
  CHECK(cfg.raster_size == 640);  // untouched fields keep their defaults
  fs::remove_all(dir);
}

TEST_CASE("run validates referenced inputs before doing any work") {
  const auto dir = fresh_dir("validate");
  const fs::path out = dir / "never_created";

  pipeline::PipelineConfig cfg = small_cfg(out);
  cfg.input_csv = (dir / "absent.csv").string();
  CHECK_THROWS_WITH_AS(
      pipeline::run_pipeline(cfg),
      ("input_csv does not exist: " + cfg.input_csv).c_str(), ConfigError);
  CHECK_FALSE(fs::exists(out));

  pipeline::PipelineConfig cfg2 = small_cfg(out);
  cfg2.network = (dir / "absent.geojson").string();
  CHECK_THROWS_WITH_AS(
      pipeline::run_pipeline(cfg2),
      ("network does not exist: " + cfg2.network).c_str(), ConfigError);
  CHECK_FALSE(fs::exists(out));

  pipeline::PipelineConfig cfg3 = small_cfg(out);
  cfg3.simulate.n_journeys = 0;
  CHECK_THROWS_WITH_AS(pipeline::run_pipeline(cfg3),
                       "no input_csv and nothing to simulate", ConfigError);
  CHECK_FALSE(fs::exists(out));
  fs::remove_all(dir);
}

TEST_CASE("a self-simulated heuristic run is consistent and reproducible") {
  const auto out = fresh_dir("run");
  const auto cfg = small_cfg(out);

  const std::string text = pipeline::run_pipeline(cfg);
  CHECK(text == read_file(out / "summary.json"));
  const auto first = snapshot(out);

  // Same config, same directory: every artifact must come back identical.
  const std::string text2 = pipeline::run_pipeline(cfg);
  CHECK(text2 == text);
  const auto second = snapshot(out);
  REQUIRE(second.size() == first.size());
  for (const auto& [path, bytes] : first) {
    REQUIRE(second.count(path) == 1);
    CHECK_MESSAGE(second.at(path) == bytes, "artifact differs: ", path);
  }

  const njson doc = njson::parse(text);
  const auto& st = doc.at("stages");

  const auto cells = st.at("tile").at("cells").get<std::size_t>();
  const auto labeled = st.at("label").at("labeled").get<std::size_t>();
  const auto sparse = st.at("label").at("excluded_sparse").get<std::size_t>();
  CHECK(cells == labeled + sparse);
  CHECK(st.at("label").at("intersections").get<std::size_t>() >= 1);
  CHECK(st.at("label").at("straights").get<std::size_t>() >= 1);

  CHECK(st.at("simulate").at("journeys").get<std::size_t>() == 24);
  CHECK(st.at("ingest").at("journeys").get<std::size_t>() == 24);
  CHECK(st.at("ingest").at("rejected").get<std::size_t>() == 0);
  CHECK(st.at("render").at("tiles").get<std::size_t>() == cells);

  const auto train_n = st.at("split").at("train").get<std::size_t>();
  const auto test_n = st.at("split").at("test").get<std::size_t>();
  CHECK(train_n + test_n == labeled);
  CHECK(test_n >= 1);

  CHECK(st.at("classify").at("predicted").get<std::size_t>() == labeled);
  CHECK(st.at("evaluate").at("evaluated").get<std::size_t>() == labeled);
  CHECK(st.at("map").at("features").get<std::size_t>() == labeled);
  CHECK_FALSE(st.contains("train"));  // the geometric classifier has no fit

  CHECK(doc.at("config").at("classifier") == "heuristic");
  CHECK(doc.at("config").at("out_dir") == out.string());
  CHECK_FALSE(doc.at("artifacts").contains("model"));

  for (const char* name :
       {"network.geojson", "journeys.csv", "clips.jsonl", "tiles.jsonl",
        "labels.jsonl", "dataset.json", "predictions.jsonl", "report.json",
        "confusion.csv", "map.geojson", "summary.json"})
    CHECK_MESSAGE(fs::exists(out / name), "missing artifact: ", name);

  std::size_t pngs = 0;
  for (const auto& e : fs::directory_iterator(out / "tiles"))
    if (e.path().extension() == ".png") ++pngs;
  CHECK(pngs == cells);

  CHECK(count_lines(read_file(out / "labels.jsonl")) == labeled);
  CHECK(count_lines(read_file(out / "predictions.jsonl")) == labeled);

  const njson rep = njson::parse(read_file(out / "report.json"));
  const auto& cm = rep.at("confusion");
  const std::size_t cm_total = cm[0][0].get<std::size_t>() +
                               cm[0][1].get<std::size_t>() +
                               cm[1][0].get<std::size_t>() +
                               cm[1][1].get<std::size_t>();
  CHECK(cm_total == labeled);
  const double acc = rep.at("accuracy").get<double>();
  CHECK(acc == st.at("evaluate").at("accuracy").get<double>());
  // Noise-free geometry should be almost entirely recovered.
  CHECK(acc >= 0.8);

  const std::string csv = read_file(out / "confusion.csv");
  CHECK(csv.rfind("actual,predicted,count\n", 0) == 0);
  CHECK(count_lines(csv) == 5);

  // Staged execution over the same directory reproduces the run's numbers.
  const auto ev = pipeline::stage_evaluate(cfg);
  CHECK(ev.evaluated == labeled);
  CHECK(ev.report.accuracy == acc);

  fs::remove_all(out);
}

TEST_CASE("cli exit codes distinguish config, data, and training failures") {
  const auto dir = fresh_dir("cli");

  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 1);               // a subcommand is required
  CHECK(run_cli("--bogus-flag") == 1);   // unknown flag
  CHECK(run_cli("simulate --config " + (dir / "absent.json").string()) == 1);
  CHECK(run_cli("simulate --rows 1 --out " + (dir / "sim").string()) == 1);

  // Tiling before any journeys exist is a data problem, not a config one.
  CHECK(run_cli("tile --out " + (dir / "empty").string()) == 2);

  // An absurd learning rate must surface as the dedicated training exit.
  const fs::path tr = dir / "train";
  write_train_fixture(tr);
  CHECK(run_cli("train --out " + tr.string() +
                " --learning-rate 1e15 --epochs 6 --batch 2"
                " --input-size 16") == 3);

  // The same fixture trains cleanly at a sane rate.
  CHECK(run_cli("train --out " + tr.string() +
                " --learning-rate 0.01 --epochs 2 --batch 2"
                " --input-size 16") == 0);
  CHECK(fs::exists(tr / "model.bin"));
  CHECK(fs::exists(tr / "loss.json"));

  fs::remove_all(dir);
}

TEST_CASE("cli run produces the same summary the library writes") {
  const auto dir = fresh_dir("clirun");
  const fs::path out = dir / "out";
  auto cfg = small_cfg(out);
  write_file(dir / "cfg.json", pipeline::config_to_json(cfg));

  CHECK(run_cli("run --config " + (dir / "cfg.json").string()) == 0);
  REQUIRE(fs::exists(out / "summary.json"));

  const njson doc = njson::parse(read_file(out / "summary.json"));
  CHECK(doc.at("stages").at("evaluate").at("evaluated").get<std::size_t>() >=
        1);
  CHECK(doc.at("config").at("seed").get<std::uint64_t>() == 42);
  fs::remove_all(dir);
}

}  // TEST_SUITE
