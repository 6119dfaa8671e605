// Command-line front end: one subcommand per pipeline stage plus `run`.
// A JSON config seeds every setting; any flag given on the command line
// overrides the corresponding config field.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "trajmap/errors.hpp"
#include "trajmap/metrics.hpp"
#include "trajmap/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  int precision = 0;
  int raster_size = 0;
  std::string mode;
  double v_max = 0;
  int line_width = 0;
  std::size_t min_points = 0;
  double test_fraction = 0;
  int augment_k = 0;
  int epochs = 0;
  int batch = 0;
  double learning_rate = 0;
  double momentum = 0;
  int input_size = 0;
  double threshold = 0;
  std::string classifier;
  double snap = 0;
  double min_branch = 0;
  double filter_offset = 0;
  std::string eval_scope;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string kind;
  int rows = 0;
  int cols = 0;
  double spacing = 0;
  double origin_lat = 0;
  double origin_lon = 0;
  int journeys = 0;
  double interval = 0;
  double cruise = 0;
  double slow_factor = 0;
  double slow_radius = 0;
  double sigma = 0;
  std::string input;
  std::string network;
  std::string out;
};

void add_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON config file");
  app.add_option("--precision", f.precision, "geohash precision (1..12)");
  app.add_option("--raster-size", f.raster_size, "tile raster size, pixels");
  app.add_option("--mode", f.mode, "raster mode: grayscale | speed");
  app.add_option("--v-max", f.v_max, "speed color ramp ceiling, m/s");
  app.add_option("--line-width", f.line_width, "trajectory brush, pixels");
  app.add_option("--min-points", f.min_points,
                 "minimum waypoints for a cell to be labeled");
  app.add_option("--test-fraction", f.test_fraction, "held-out fraction");
  app.add_option("--augment-k", f.augment_k, "augmented variants/original");
  app.add_option("--epochs", f.epochs, "training epochs");
  app.add_option("--batch", f.batch, "training batch size");
  app.add_option("--learning-rate", f.learning_rate, "SGD learning rate");
  app.add_option("--momentum", f.momentum, "SGD momentum");
  app.add_option("--input-size", f.input_size, "model input size, pixels");
  app.add_option("--threshold", f.threshold, "intersection decision threshold");
  app.add_option("--classifier", f.classifier, "cnn | heuristic");
  app.add_option("--snap", f.snap, "heuristic node snap, meters");
  app.add_option("--min-branch", f.min_branch,
                 "heuristic branch merge angle, degrees");
  app.add_option("--filter-offset", f.filter_offset,
                 "max distance to the reference network, meters");
  app.add_option("--eval-scope", f.eval_scope, "evaluate on: test | all");
  app.add_option("--seed", f.seed, "master seed");
  app.add_option("--workers", f.workers, "worker threads (0 = auto)");
  app.add_option("--kind", f.kind, "network kind: grid | perturbed-grid");
  app.add_option("--rows", f.rows, "network rows");
  app.add_option("--cols", f.cols, "network columns");
  app.add_option("--spacing", f.spacing, "network node spacing, meters");
  app.add_option("--origin-lat", f.origin_lat, "network origin latitude");
  app.add_option("--origin-lon", f.origin_lon, "network origin longitude");
  app.add_option("--journeys", f.journeys, "simulated journey count");
  app.add_option("--interval", f.interval, "sample interval, seconds");
  app.add_option("--cruise", f.cruise, "cruise speed, m/s");
  app.add_option("--slow-factor", f.slow_factor, "intersection slow factor");
  app.add_option("--slow-radius", f.slow_radius, "slow-down radius, meters");
  app.add_option("--sigma", f.sigma, "GPS noise sigma, meters");
  app.add_option("--input", f.input, "waypoint CSV to ingest");
  app.add_option("--network", f.network, "reference network GeoJSON");
  app.add_option("--out", f.out, "output directory");
}

trajmap::pipeline::PipelineConfig build_config(const CLI::App& app,
                                               const Flags& f) {
  using trajmap::pipeline::PipelineConfig;
  PipelineConfig cfg;
  if (app.count("--config")) cfg = trajmap::pipeline::load_config_file(f.config);

  const auto set = [&](const char* flag) { return app.count(flag) > 0; };
  if (set("--precision")) cfg.precision = f.precision;
  if (set("--raster-size")) cfg.raster_size = f.raster_size;
  if (set("--mode")) cfg.mode = f.mode;
  if (set("--v-max")) cfg.v_max = f.v_max;
  if (set("--line-width")) cfg.line_width = f.line_width;
  if (set("--min-points")) cfg.min_points = f.min_points;
  if (set("--test-fraction")) cfg.test_fraction = f.test_fraction;
  if (set("--augment-k")) cfg.augment_k = f.augment_k;
  if (set("--epochs")) cfg.train.epochs = f.epochs;
  if (set("--batch")) cfg.train.batch = f.batch;
  if (set("--learning-rate")) cfg.train.learning_rate = f.learning_rate;
  if (set("--momentum")) cfg.train.momentum = f.momentum;
  if (set("--input-size")) cfg.train.input_size = f.input_size;
  if (set("--threshold")) cfg.threshold = f.threshold;
  if (set("--classifier")) cfg.classifier = f.classifier;
  if (set("--snap")) cfg.snap_m = f.snap;
  if (set("--min-branch")) cfg.min_branch_deg = f.min_branch;
  if (set("--filter-offset")) cfg.filter_offset_m = f.filter_offset;
  if (set("--eval-scope")) cfg.eval_scope = f.eval_scope;
  if (set("--seed")) cfg.seed = f.seed;
  if (set("--workers")) cfg.workers = f.workers;
  if (set("--kind")) cfg.simulate.kind = f.kind;
  if (set("--rows")) cfg.simulate.rows = f.rows;
  if (set("--cols")) cfg.simulate.cols = f.cols;
  if (set("--spacing")) cfg.simulate.spacing_m = f.spacing;
  if (set("--origin-lat")) cfg.simulate.origin_lat = f.origin_lat;
  if (set("--origin-lon")) cfg.simulate.origin_lon = f.origin_lon;
  if (set("--journeys")) cfg.simulate.n_journeys = f.journeys;
  if (set("--interval")) cfg.simulate.sample_interval_s = f.interval;
  if (set("--cruise")) cfg.simulate.cruise_speed_mps = f.cruise;
  if (set("--slow-factor")) cfg.simulate.slow_factor = f.slow_factor;
  if (set("--slow-radius")) cfg.simulate.slow_radius_m = f.slow_radius;
  if (set("--sigma")) cfg.simulate.gps_noise_sigma_m = f.sigma;
  if (set("--input")) cfg.input_csv = f.input;
  if (set("--network")) cfg.network = f.network;
  if (set("--out")) cfg.out_dir = f.out;
  return cfg;
}

int dispatch(const std::string& cmd,
             const trajmap::pipeline::PipelineConfig& cfg) {
  namespace pl = trajmap::pipeline;
  if (cmd == "simulate") {
    const auto s = pl::stage_simulate(cfg);
    std::cout << "simulate: " << s.nodes << " nodes, " << s.edges
              << " edges, " << s.intersections << " intersections, "
              << s.journeys << " journeys, " << s.waypoints << " waypoints\n";
  } else if (cmd == "ingest") {
    const auto s = pl::stage_ingest(cfg);
    std::cout << "ingest: " << s.rows << " rows (" << s.rejected
              << " rejected), " << s.journeys << " journeys ("
              << s.dropped_groups << " groups dropped), " << s.waypoints
              << " waypoints kept\n";
  } else if (cmd == "tile") {
    const auto s = pl::stage_tile(cfg);
    std::cout << "tile: " << s.cells << " cells, " << s.chains << " chains, "
              << s.cell_points << " indexed waypoints\n";
  } else if (cmd == "render") {
    const auto s = pl::stage_render(cfg);
    std::cout << "render: " << s.tiles << " tiles\n";
  } else if (cmd == "label") {
    const auto s = pl::stage_label(cfg);
    std::cout << "label: " << s.labeled << " labeled ("
              << s.intersections << " intersection, " << s.straights
              << " straight), " << s.excluded_sparse << " sparse excluded\n";
  } else if (cmd == "split") {
    const auto s = pl::stage_split(cfg);
    std::cout << "split: " << s.train_total << " train / " << s.test_total
              << " test (test: " << s.test_by_class[0] << " intersection, "
              << s.test_by_class[1] << " straight)\n";
  } else if (cmd == "train") {
    const auto s = pl::stage_train(cfg);
    std::cout << "train: " << s.originals << " originals + " << s.augmented
              << " augmented, " << s.epochs << " epochs, loss "
              << s.first_loss << " -> " << s.final_loss << "\n";
  } else if (cmd == "classify") {
    const auto s = pl::stage_classify(cfg);
    std::cout << "classify: " << s.predicted << " cells ("
              << s.intersections << " intersection, " << s.straights
              << " straight)\n";
  } else if (cmd == "evaluate") {
    const auto s = pl::stage_evaluate(cfg);
    std::cout << trajmap::metrics::format_report(s.report);
  } else if (cmd == "map") {
    const auto s = pl::stage_map(cfg);
    std::cout << "map: " << s.features << " features\n";
  } else if (cmd == "run") {
    std::cout << pl::run_pipeline(cfg);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GPS trajectory to classified road map pipeline"};
  app.require_subcommand(1);

  Flags flags;
  add_flags(app, flags);

  const std::pair<const char*, const char*> cmds[] = {
      {"simulate", "generate a synthetic network and journeys"},
      {"ingest", "load, clean and optionally map-match waypoints"},
      {"tile", "assign journeys to geohash cells and clip"},
      {"render", "rasterize clipped tiles to PNG"},
      {"label", "label cells from intersection points"},
      {"split", "stratified train/test split"},
      {"train", "train the tile classifier"},
      {"classify", "predict a class for every labeled cell"},
      {"evaluate", "score predictions against labels"},
      {"map", "export the classified cell map as GeoJSON"},
      {"run", "execute the full pipeline"},
  };
  for (const auto& [name, desc] : cmds)
    app.add_subcommand(name, desc)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto cfg = build_config(app, flags);
    return dispatch(app.get_subcommands().front()->get_name(), cfg);
  } catch (const trajmap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const trajmap::TrainError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return 3;
  } catch (const trajmap::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
