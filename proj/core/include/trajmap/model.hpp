#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trajmap/dataset.hpp"
#include "trajmap/raster.hpp"
#include "trajmap/types.hpp"

namespace trajmap::model {

enum class LayerKind : std::uint8_t {
  conv = 0,
  relu = 1,
  maxpool = 2,
  flatten = 3,
  dense = 4,
  softmax = 5,
};

struct LayerSpec {
  LayerKind kind = LayerKind::conv;
  std::uint32_t out = 0;     // conv: filters; dense: units
  std::uint32_t kernel = 0;  // conv/maxpool window
  std::uint32_t stride = 1;
  std::uint32_t pad = 0;
};

// Small fixed classifier:
//   input SxSxC -> conv 3x3x8 (pad 1) + relu -> maxpool 2
//               -> conv 3x3x16 (pad 1) + relu -> maxpool 2
//               -> flatten -> dense 2 -> softmax
// Weights are float32; all dot products accumulate in double.
struct Model {
  std::uint8_t version = 1;
  std::uint32_t input_size = 64;  // multiple of 4, >= 8
  std::uint32_t channels = 1;
  std::uint64_t training_seed = 0;
  std::vector<LayerSpec> layers;
  std::vector<std::string> class_order;  // {"intersection", "straight"}
  std::vector<float> w1, b1, w2, b2, wf, bf;
};

std::vector<LayerSpec> reference_layers();

// Variance-scaled (He) initialization of conv/dense weights, zero biases.
Model make_model(int input_size, int channels, std::uint64_t seed);

struct TrainConfig {
  int epochs = 30;
  int batch = 16;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int input_size = 64;
  std::uint64_t seed = 1;
};

struct TrainResult {
  Model model;
  std::vector<double> loss_curve;  // per-epoch mean cross-entropy
};

// SGD with momentum, deterministic batch order per seed. Per-sample
// gradients are computed independently and reduced in sample order, so any
// worker count yields bit-identical models.
TrainResult train_model(const std::vector<dataset::TileSample>& train,
                        const TrainConfig& config, int workers = 1);

// Class probabilities (intersection, straight); raster is area-averaged down
// to the model input size first.
std::array<double, 2> forward_probs(const Model& m,
                                    const raster::TileRaster& r);

Prediction predict(const Model& m, const raster::TileRaster& r,
                   double threshold = 0.5);

// Max relative error between analytic gradients and central finite
// differences on >= 100 deterministically chosen parameters (evaluated in a
// double-precision shadow of the model so the comparison is meaningful).
double gradient_check(const Model& m, const dataset::TileSample& sample,
                      double epsilon);

std::string save_bytes(const Model& m);
Model load_bytes(const std::string& bytes);
void save_file(const Model& m, const std::string& path);
Model load_file(const std::string& path);

}  // namespace trajmap::model
