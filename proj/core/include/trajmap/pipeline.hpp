#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajmap/metrics.hpp"
#include "trajmap/model.hpp"
#include "trajmap/simgen.hpp"

namespace trajmap::pipeline {

struct SimSection {
  std::string kind = "perturbed-grid";  // "grid" | "perturbed-grid"
  int rows = 5;
  int cols = 5;
  double spacing_m = 400.0;
  double origin_lat = 40.0;
  double origin_lon = -88.0;
  int n_journeys = 200;
  double sample_interval_s = 1.0;
  double cruise_speed_mps = 15.0;
  double slow_factor = 0.3;
  double slow_radius_m = 40.0;
  double gps_noise_sigma_m = 2.0;
};

// One document drives a whole run; every artifact is a function of
// (config, inputs) alone. Per-stage seeds are derived from `seed`.
struct PipelineConfig {
  int precision = 8;
  int raster_size = 640;
  std::string mode = "speed";  // "grayscale" | "speed"
  double v_max = 35.0;
  int line_width = 2;
  std::size_t min_points = 5;
  double test_fraction = 0.10;
  int augment_k = 2;
  model::TrainConfig train;  // .seed is derived from `seed` at use
  double threshold = 0.5;
  std::string classifier = "cnn";  // "cnn" | "heuristic"
  double snap_m = 2.0;
  double min_branch_deg = 30.0;
  std::optional<double> filter_offset_m;
  std::string eval_scope = "test";  // "test" | "all"
  std::vector<metrics::ReferenceEntry> reference;
  std::uint64_t seed = 42;
  int workers = 0;  // 0 = auto
  SimSection simulate;
  std::string input_csv;  // empty: `run` simulates instead of ingesting
  std::string network;    // empty: <out>/network.geojson
  std::string out_dir = "out";
};

PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config_file(const std::string& path);
std::string config_to_json(const PipelineConfig& cfg);

struct SimulateOut {
  std::size_t nodes = 0, edges = 0, intersections = 0;
  std::size_t journeys = 0, waypoints = 0;
};
struct IngestOut {
  std::size_t rows = 0, rejected = 0;
  std::size_t journeys = 0, dropped_groups = 0;
  std::size_t filtered_points = 0, filtered_journeys = 0;
  std::size_t waypoints = 0;
};
struct TileOut {
  std::size_t cells = 0, chains = 0, cell_points = 0;
};
struct RenderOut {
  std::size_t tiles = 0;
};
struct LabelOut {
  std::size_t labeled = 0, excluded_sparse = 0;
  std::size_t intersections = 0, straights = 0;
};
struct SplitOut {
  std::size_t train_total = 0, test_total = 0;
  std::size_t train_by_class[2] = {0, 0};
  std::size_t test_by_class[2] = {0, 0};
};
struct TrainOut {
  std::size_t originals = 0, augmented = 0;
  int epochs = 0;
  double first_loss = 0.0, final_loss = 0.0;
};
struct ClassifyOut {
  std::size_t predicted = 0, intersections = 0, straights = 0;
};
struct EvaluateOut {
  std::size_t evaluated = 0;
  metrics::EvalReport report;
};
struct MapOut {
  std::size_t features = 0;
};

// Stages read and write files under out_dir; each maps 1:1 onto a CLI
// subcommand, and `run` chains them, so staged and single-shot executions
// share every code path.
SimulateOut stage_simulate(const PipelineConfig& cfg);
IngestOut stage_ingest(const PipelineConfig& cfg);
TileOut stage_tile(const PipelineConfig& cfg);
RenderOut stage_render(const PipelineConfig& cfg);
LabelOut stage_label(const PipelineConfig& cfg);
SplitOut stage_split(const PipelineConfig& cfg);
TrainOut stage_train(const PipelineConfig& cfg);
ClassifyOut stage_classify(const PipelineConfig& cfg);
EvaluateOut stage_evaluate(const PipelineConfig& cfg);
MapOut stage_map(const PipelineConfig& cfg);

// Full pipeline. Validates referenced inputs up front, runs the stages in
// order, writes <out>/summary.json, and returns that document's text.
std::string run_pipeline(const PipelineConfig& cfg);

}  // namespace trajmap::pipeline
