#include "trajmap/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <numeric>
#include <set>
#include <thread>

#include "trajmap/errors.hpp"
#include "trajmap/rng.hpp"

namespace trajmap::model {

namespace {

constexpr int kC1 = 8;
constexpr int kC2 = 16;

struct Dims {
  int S, C, p1, p2, fc_in;
};

Dims dims_for(int input_size, int channels) {
  if (input_size < 8 || input_size % 4 != 0)
    throw ConfigError("model input size must be a multiple of 4, >= 8");
  if (channels != 1 && channels != 3)
    throw ConfigError("model channels must be 1 or 3");
  Dims d;
  d.S = input_size;
  d.C = channels;
  d.p1 = d.S / 2;
  d.p2 = d.S / 4;
  d.fc_in = kC2 * d.p2 * d.p2;
  return d;
}

template <typename T>
struct Net {
  Dims d;
  std::vector<T> w1, b1, w2, b2, wf, bf;
};

template <typename T>
Net<T> from_model(const Model& m) {
  Net<T> n;
  n.d = dims_for(static_cast<int>(m.input_size),
                 static_cast<int>(m.channels));
  const auto cp = [](const std::vector<float>& src, std::vector<T>& dst) {
    dst.assign(src.begin(), src.end());
  };
  cp(m.w1, n.w1);
  cp(m.b1, n.b1);
  cp(m.w2, n.w2);
  cp(m.b2, n.b2);
  cp(m.wf, n.wf);
  cp(m.bf, n.bf);
  return n;
}

// Scratch buffers for one forward/backward pass.
template <typename T>
struct Work {
  std::vector<T> a1, q1, a2, q2;          // post-relu and pooled activations
  std::vector<int> m1, m2;                // pool argmax indices
  std::vector<double> dq2, da2, dq1, da1;  // backward buffers

  explicit Work(const Dims& d) {
    a1.resize(static_cast<std::size_t>(kC1) * d.S * d.S);
    m1.resize(static_cast<std::size_t>(kC1) * d.p1 * d.p1);
    q1.resize(m1.size());
    a2.resize(static_cast<std::size_t>(kC2) * d.p1 * d.p1);
    m2.resize(static_cast<std::size_t>(kC2) * d.p2 * d.p2);
    q2.resize(m2.size());
    dq2.resize(q2.size());
    da2.resize(a2.size());
    dq1.resize(q1.size());
    da1.resize(a1.size());
  }
};

template <typename T>
void conv3x3_relu(const T* in, int C, int H, int W, const std::vector<T>& w,
                  const std::vector<T>& b, int F, std::vector<T>& out) {
  for (int f = 0; f < F; ++f)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        double acc = static_cast<double>(b[f]);
        for (int c = 0; c < C; ++c) {
          const T* wc = &w[(static_cast<std::size_t>(f) * C + c) * 9];
          const T* ic = in + static_cast<std::size_t>(c) * H * W;
          for (int ky = 0; ky < 3; ++ky) {
            const int iy = y + ky - 1;
            if (iy < 0 || iy >= H) continue;
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = x + kx - 1;
              if (ix < 0 || ix >= W) continue;
              acc += static_cast<double>(wc[ky * 3 + kx]) * ic[iy * W + ix];
            }
          }
        }
        out[(static_cast<std::size_t>(f) * H + y) * W + x] =
            acc > 0.0 ? static_cast<T>(acc) : T(0);
      }
}

template <typename T>
void maxpool2(const std::vector<T>& in, int C, int H, int W,
              std::vector<T>& out, std::vector<int>& argmax) {
  const int h = H / 2, w = W / 2;
  for (int c = 0; c < C; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        int best = (c * H + 2 * y) * W + 2 * x;
        T bv = in[best];
        const int cand[3] = {best + 1, best + W, best + W + 1};
        for (int k = 0; k < 3; ++k)
          if (in[cand[k]] > bv) {
            bv = in[cand[k]];
            best = cand[k];
          }
        out[(static_cast<std::size_t>(c) * h + y) * w + x] = bv;
        argmax[(static_cast<std::size_t>(c) * h + y) * w + x] = best;
      }
}

void softmax2(const double logits[2], double probs[2]) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  probs[0] = e0 / (e0 + e1);
  probs[1] = e1 / (e0 + e1);
}

template <typename T>
void forward(const Net<T>& n, const std::vector<T>& x, Work<T>& ws,
             double probs[2]) {
  const auto& d = n.d;
  conv3x3_relu(x.data(), d.C, d.S, d.S, n.w1, n.b1, kC1, ws.a1);
  maxpool2(ws.a1, kC1, d.S, d.S, ws.q1, ws.m1);
  conv3x3_relu(ws.q1.data(), kC1, d.p1, d.p1, n.w2, n.b2, kC2, ws.a2);
  maxpool2(ws.a2, kC2, d.p1, d.p1, ws.q2, ws.m2);
  double logits[2];
  for (int k = 0; k < 2; ++k) {
    double acc = static_cast<double>(n.bf[k]);
    const T* wk = &n.wf[static_cast<std::size_t>(k) * d.fc_in];
    for (int i = 0; i < d.fc_in; ++i)
      acc += static_cast<double>(wk[i]) * ws.q2[i];
    logits[k] = acc;
  }
  softmax2(logits, probs);
}

double xent(const double probs[2], int target) {
  return -std::log(std::max(probs[target], 1e-300));
}

struct Grad {
  std::vector<double> w1, b1, w2, b2, wf, bf;

  explicit Grad(const Dims& d) {
    w1.resize(static_cast<std::size_t>(kC1) * d.C * 9);
    b1.resize(kC1);
    w2.resize(static_cast<std::size_t>(kC2) * kC1 * 9);
    b2.resize(kC2);
    wf.resize(static_cast<std::size_t>(2) * d.fc_in);
    bf.resize(2);
  }
  void zero() {
    for (auto* v : {&w1, &b1, &w2, &b2, &wf, &bf})
      std::fill(v->begin(), v->end(), 0.0);
  }
  void add(const Grad& o) {
    const auto acc = [](std::vector<double>& a, const std::vector<double>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    };
    acc(w1, o.w1);
    acc(b1, o.b1);
    acc(w2, o.w2);
    acc(b2, o.b2);
    acc(wf, o.wf);
    acc(bf, o.bf);
  }
};

// dout carries the gradient at the post-relu output; the relu mask is
// applied here. din (optional) receives the gradient at the layer input.
template <typename T>
void conv3x3_backward(const T* in, int C, int H, int W,
                      const std::vector<T>& w, int F,
                      const std::vector<T>& post,
                      const std::vector<double>& dout,
                      std::vector<double>& dw, std::vector<double>& db,
                      std::vector<double>* din) {
  for (int f = 0; f < F; ++f)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) {
        const std::size_t oi = (static_cast<std::size_t>(f) * H + y) * W + x;
        if (!(post[oi] > T(0))) continue;
        const double g = dout[oi];
        if (g == 0.0) continue;
        db[f] += g;
        for (int c = 0; c < C; ++c) {
          const std::size_t wb = (static_cast<std::size_t>(f) * C + c) * 9;
          const std::size_t ib = static_cast<std::size_t>(c) * H * W;
          for (int ky = 0; ky < 3; ++ky) {
            const int iy = y + ky - 1;
            if (iy < 0 || iy >= H) continue;
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = x + kx - 1;
              if (ix < 0 || ix >= W) continue;
              dw[wb + ky * 3 + kx] += g * static_cast<double>(in[ib + iy * W + ix]);
              if (din)
                (*din)[ib + iy * W + ix] +=
                    static_cast<double>(w[wb + ky * 3 + kx]) * g;
            }
          }
        }
      }
}

// Cross-entropy loss and parameter gradients for one sample.
template <typename T>
double sample_grad(const Net<T>& n, const std::vector<T>& x, int target,
                   Work<T>& ws, Grad& g) {
  const auto& d = n.d;
  double probs[2];
  forward(n, x, ws, probs);

  double dl[2] = {probs[0], probs[1]};
  dl[target] -= 1.0;

  std::fill(ws.dq2.begin(), ws.dq2.end(), 0.0);
  for (int k = 0; k < 2; ++k) {
    g.bf[k] += dl[k];
    const std::size_t wb = static_cast<std::size_t>(k) * d.fc_in;
    for (int i = 0; i < d.fc_in; ++i) {
      g.wf[wb + i] += dl[k] * static_cast<double>(ws.q2[i]);
      ws.dq2[i] += dl[k] * static_cast<double>(n.wf[wb + i]);
    }
  }

  std::fill(ws.da2.begin(), ws.da2.end(), 0.0);
  for (std::size_t o = 0; o < ws.dq2.size(); ++o)
    ws.da2[ws.m2[o]] += ws.dq2[o];

  std::fill(ws.dq1.begin(), ws.dq1.end(), 0.0);
  conv3x3_backward(ws.q1.data(), kC1, d.p1, d.p1, n.w2, kC2, ws.a2, ws.da2,
                   g.w2, g.b2, &ws.dq1);

  std::fill(ws.da1.begin(), ws.da1.end(), 0.0);
  for (std::size_t o = 0; o < ws.dq1.size(); ++o)
    ws.da1[ws.m1[o]] += ws.dq1[o];

  conv3x3_backward(x.data(), d.C, d.S, d.S, n.w1, kC1, ws.a1, ws.da1, g.w1,
                   g.b1, nullptr);
  return xent(probs, target);
}

template <typename T>
std::vector<T> normalize_input(const raster::TileRaster& r, const Dims& d) {
  const auto vals = raster::resize_mean(r, d.S, d.S);
  // resize_mean returns interleaved channels; the net wants planes.
  std::vector<T> x(static_cast<std::size_t>(d.C) * d.S * d.S);
  for (int y = 0; y < d.S; ++y)
    for (int xx = 0; xx < d.S; ++xx)
      for (int c = 0; c < d.C; ++c)
        x[(static_cast<std::size_t>(c) * d.S + y) * d.S + xx] =
            static_cast<T>(vals[(static_cast<std::size_t>(y) * d.S + xx) * d.C + c] / 255.0);
  return x;
}

void check_input(const Model& m, const raster::TileRaster& r) {
  if (r.width < 1 || r.height < 1) throw DataError("empty raster");
  if (static_cast<std::uint32_t>(r.channels) != m.channels)
    throw DataError("raster channels do not match model input spec");
}

const std::vector<std::string>& expected_classes() {
  static const std::vector<std::string> v{"intersection", "straight"};
  return v;
}

}  // namespace

std::vector<LayerSpec> reference_layers() {
  return {
      {LayerKind::conv, kC1, 3, 1, 1},  {LayerKind::relu, 0, 0, 1, 0},
      {LayerKind::maxpool, 0, 2, 2, 0}, {LayerKind::conv, kC2, 3, 1, 1},
      {LayerKind::relu, 0, 0, 1, 0},    {LayerKind::maxpool, 0, 2, 2, 0},
      {LayerKind::flatten, 0, 0, 1, 0}, {LayerKind::dense, 2, 0, 1, 0},
      {LayerKind::softmax, 0, 0, 1, 0},
  };
}

Model make_model(int input_size, int channels, std::uint64_t seed) {
  const Dims d = dims_for(input_size, channels);
  Model m;
  m.input_size = static_cast<std::uint32_t>(input_size);
  m.channels = static_cast<std::uint32_t>(channels);
  m.training_seed = seed;
  m.layers = reference_layers();
  m.class_order = expected_classes();
  m.w1.resize(static_cast<std::size_t>(kC1) * d.C * 9);
  m.b1.assign(kC1, 0.0f);
  m.w2.resize(static_cast<std::size_t>(kC2) * kC1 * 9);
  m.b2.assign(kC2, 0.0f);
  m.wf.resize(static_cast<std::size_t>(2) * d.fc_in);
  m.bf.assign(2, 0.0f);

  rng::Engine eng(rng::mix(seed, rng::hash_str("init")));
  const auto he = [&](std::vector<float>& w, double fan_in) {
    const double sd = std::sqrt(2.0 / fan_in);
    for (auto& v : w) v = static_cast<float>(eng.gaussian() * sd);
  };
  he(m.w1, static_cast<double>(d.C) * 9);
  he(m.w2, static_cast<double>(kC1) * 9);
  he(m.wf, static_cast<double>(d.fc_in));
  return m;
}

TrainResult train_model(const std::vector<dataset::TileSample>& train,
                        const TrainConfig& config, int workers) {
  if (config.epochs < 1 || config.batch < 1)
    throw ConfigError("epochs and batch must be >= 1");
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate))
    throw ConfigError("learning rate must be finite and >= 0");
  if (!(config.momentum >= 0.0 && config.momentum < 1.0))
    throw ConfigError("momentum must be in [0, 1)");
  if (train.empty()) throw ConfigError("empty training set");

  bool seen[2] = {false, false};
  for (const auto& s : train) seen[static_cast<int>(s.label)] = true;
  if (!seen[0] || !seen[1])
    throw ConfigError("training set must contain both classes");

  const int channels = train.front().raster.channels;
  for (const auto& s : train)
    if (s.raster.channels != channels)
      throw DataError("mixed raster channel counts in training set");

  const Dims d = dims_for(config.input_size, channels);
  Model m = make_model(config.input_size, channels, config.seed);
  Net<float> net = from_model<float>(m);

  const std::size_t n = train.size();
  std::vector<std::vector<float>> xs(n);
  std::vector<int> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = normalize_input<float>(train[i].raster, d);
    targets[i] = static_cast<int>(train[i].label);
  }

  if (workers < 1)
    workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  const int threads = std::min<int>(config.batch, workers);
  std::vector<Work<float>> works;
  for (int i = 0; i < threads; ++i) works.emplace_back(d);
  // One gradient buffer per batch position: each sample's gradient is
  // computed in isolation and the reduction runs in batch order, so the
  // result is independent of the worker count.
  std::vector<Grad> grads;
  for (int i = 0; i < config.batch; ++i) grads.emplace_back(d);
  Grad vel(d), gsum(d);
  vel.zero();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> losses(n);
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng::Engine eng(rng::mix(config.seed,
                             rng::mix(rng::hash_str("epoch"),
                                      static_cast<std::uint64_t>(epoch))));
    eng.shuffle(order);

    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(config.batch)) {
      const std::size_t count =
          std::min<std::size_t>(config.batch, n - start);
      const int active = static_cast<int>(std::min<std::size_t>(threads, count));

      const auto run_slot = [&](int slot) {
        for (std::size_t k = slot; k < count; k += active) {
          const std::size_t idx = order[start + k];
          grads[k].zero();
          losses[idx] =
              sample_grad(net, xs[idx], targets[idx], works[slot], grads[k]);
        }
      };
      if (active == 1) {
        run_slot(0);
      } else {
        std::vector<std::future<void>> futs;
        futs.reserve(active - 1);
        for (int s = 1; s < active; ++s)
          futs.push_back(std::async(std::launch::async, run_slot, s));
        run_slot(0);
        for (auto& f : futs) f.get();
      }

      gsum.zero();
      for (std::size_t k = 0; k < count; ++k) gsum.add(grads[k]);

      const double scale = 1.0 / static_cast<double>(count);
      const auto step = [&](std::vector<float>& w, std::vector<double>& v,
                            const std::vector<double>& g) {
        for (std::size_t i = 0; i < w.size(); ++i) {
          v[i] = config.momentum * v[i] - config.learning_rate * g[i] * scale;
          w[i] = static_cast<float>(static_cast<double>(w[i]) + v[i]);
        }
      };
      step(net.w1, vel.w1, gsum.w1);
      step(net.b1, vel.b1, gsum.b1);
      step(net.w2, vel.w2, gsum.w2);
      step(net.b2, vel.b2, gsum.b2);
      step(net.wf, vel.wf, gsum.wf);
      step(net.bf, vel.bf, gsum.bf);
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += losses[i];
    const double mean = total / static_cast<double>(n);
    if (!std::isfinite(mean))
      throw TrainError("non-finite training loss at epoch " +
                       std::to_string(epoch));
    curve.push_back(mean);
  }

  m.w1 = net.w1;
  m.b1 = net.b1;
  m.w2 = net.w2;
  m.b2 = net.b2;
  m.wf = net.wf;
  m.bf = net.bf;
  return TrainResult{std::move(m), std::move(curve)};
}

std::array<double, 2> forward_probs(const Model& m,
                                    const raster::TileRaster& r) {
  check_input(m, r);
  const auto net = from_model<float>(m);
  Work<float> ws(net.d);
  const auto x = normalize_input<float>(r, net.d);
  double probs[2];
  forward(net, x, ws, probs);
  return {probs[0], probs[1]};
}

Prediction predict(const Model& m, const raster::TileRaster& r,
                   double threshold) {
  const auto probs = forward_probs(m, r);
  Prediction p;
  p.score = probs[0];
  p.label = p.score >= threshold ? Label::intersection : Label::straight;
  return p;
}

double gradient_check(const Model& m, const dataset::TileSample& sample,
                      double epsilon) {
  if (!(epsilon >= 1e-6 && epsilon <= 1e-3))
    throw ConfigError("gradient check epsilon must be in [1e-6, 1e-3]");
  check_input(m, sample.raster);

  Net<double> net = from_model<double>(m);
  Work<double> ws(net.d);
  const auto x = normalize_input<double>(sample.raster, net.d);
  const int target = static_cast<int>(sample.label);

  Grad g(net.d);
  g.zero();
  sample_grad(net, x, target, ws, g);

  std::vector<double>* params[6] = {&net.w1, &net.b1, &net.w2,
                                    &net.b2, &net.wf, &net.bf};
  const std::vector<double>* analytic[6] = {&g.w1, &g.b1, &g.w2,
                                            &g.b2, &g.wf, &g.bf};
  std::size_t total = 0;
  for (const auto* p : params) total += p->size();

  rng::Engine eng(rng::mix(m.training_seed, rng::hash_str("gradcheck")));
  std::set<std::size_t> picked;
  const std::size_t want = std::min<std::size_t>(120, total);
  while (picked.size() < want) picked.insert(eng.bounded(total));

  const auto loss_at = [&]() {
    double probs[2];
    forward(net, x, ws, probs);
    return xent(probs, target);
  };

  double max_rel = 0.0;
  for (const auto flat : picked) {
    std::size_t rem = flat;
    int arr = 0;
    while (rem >= params[arr]->size()) {
      rem -= params[arr]->size();
      ++arr;
    }
    double& w = (*params[arr])[rem];
    const double keep = w;
    w = keep + epsilon;
    const double lp = loss_at();
    w = keep - epsilon;
    const double lm = loss_at();
    w = keep;
    const double numeric = (lp - lm) / (2.0 * epsilon);
    const double exact = (*analytic[arr])[rem];
    const double denom = std::max({std::abs(numeric), std::abs(exact), 1e-8});
    max_rel = std::max(max_rel, std::abs(numeric - exact) / denom);
  }
  return max_rel;
}

namespace {

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& s, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& s, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(s, bits);
}

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;

  void need(std::size_t k) const {
    if (pos + k > s.size()) throw DataError("truncated model stream");
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(s[pos++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[pos++]))
           << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[pos++]))
           << (8 * i);
    return v;
  }
  float f32() {
    const std::uint32_t bits = u32();
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
};

constexpr char kMagic[5] = {'T', 'R', 'J', 'C', '1'};

}  // namespace

std::string save_bytes(const Model& m) {
  std::string s;
  s.append(kMagic, 5);
  s.push_back(static_cast<char>(m.version));
  put_u32(s, m.input_size);
  put_u32(s, m.channels);
  put_u64(s, m.training_seed);
  s.push_back(static_cast<char>(m.class_order.size()));
  for (const auto& c : m.class_order) {
    s.push_back(static_cast<char>(c.size()));
    s.append(c);
  }
  put_u32(s, static_cast<std::uint32_t>(m.layers.size()));
  for (const auto& l : m.layers) {
    s.push_back(static_cast<char>(l.kind));
    put_u32(s, l.out);
    put_u32(s, l.kernel);
    put_u32(s, l.stride);
    put_u32(s, l.pad);
  }
  for (const auto* arr : {&m.w1, &m.b1, &m.w2, &m.b2, &m.wf, &m.bf}) {
    put_u64(s, arr->size());
    for (const float f : *arr) put_f32(s, f);
  }
  return s;
}

Model load_bytes(const std::string& bytes) {
  Cursor c{bytes};
  c.need(5);
  if (std::memcmp(bytes.data(), kMagic, 5) != 0)
    throw DataError("bad model magic");
  c.pos = 5;
  Model m;
  m.version = c.u8();
  if (m.version != 1) throw DataError("unsupported model version");
  m.input_size = c.u32();
  m.channels = c.u32();
  m.training_seed = c.u64();
  const int nclasses = c.u8();
  for (int i = 0; i < nclasses; ++i) {
    const int len = c.u8();
    c.need(static_cast<std::size_t>(len));
    m.class_order.emplace_back(bytes, c.pos, len);
    c.pos += len;
  }
  const std::uint32_t nlayers = c.u32();
  for (std::uint32_t i = 0; i < nlayers; ++i) {
    LayerSpec l;
    l.kind = static_cast<LayerKind>(c.u8());
    l.out = c.u32();
    l.kernel = c.u32();
    l.stride = c.u32();
    l.pad = c.u32();
    m.layers.push_back(l);
  }
  for (auto* arr : {&m.w1, &m.b1, &m.w2, &m.b2, &m.wf, &m.bf}) {
    const std::uint64_t count = c.u64();
    if (count > bytes.size() / 4) throw DataError("truncated model stream");
    c.need(count * 4);
    arr->reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) arr->push_back(c.f32());
  }
  if (c.pos != bytes.size()) throw DataError("trailing bytes in model stream");

  if (m.class_order != expected_classes())
    throw DataError("unexpected class order in model stream");
  const auto ref = reference_layers();
  if (m.layers.size() != ref.size())
    throw DataError("model layer chain mismatch");
  for (std::size_t i = 0; i < ref.size(); ++i)
    if (m.layers[i].kind != ref[i].kind || m.layers[i].out != ref[i].out ||
        m.layers[i].kernel != ref[i].kernel ||
        m.layers[i].stride != ref[i].stride || m.layers[i].pad != ref[i].pad)
      throw DataError("model layer chain mismatch");
  const Dims d = dims_for(static_cast<int>(m.input_size),
                          static_cast<int>(m.channels));
  if (m.w1.size() != static_cast<std::size_t>(kC1) * d.C * 9 ||
      m.b1.size() != kC1 ||
      m.w2.size() != static_cast<std::size_t>(kC2) * kC1 * 9 ||
      m.b2.size() != kC2 ||
      m.wf.size() != static_cast<std::size_t>(2) * d.fc_in ||
      m.bf.size() != 2)
    throw DataError("model weight array sizes inconsistent with layers");
  return m;
}

void save_file(const Model& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot open for writing: " + path);
  const auto bytes = save_bytes(m);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw DataError("write failed: " + path);
}

Model load_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());
  return load_bytes(bytes);
}

}  // namespace trajmap::model
