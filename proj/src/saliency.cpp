#include "textdet/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace textdet {

void PixelNetConfig::validate() const {
  if (stage_count < 1) throw Error(ErrorCode::kInvalidArgument, "stage_count must be >= 1");
  if (stage_count > 12) throw Error(ErrorCode::kInvalidArgument, "stage_count must be <= 12");
  if (static_cast<int>(channels_per_stage.size()) != stage_count) {
    throw Error(ErrorCode::kInvalidArgument, "channels_per_stage must have stage_count entries");
  }
  for (int c : channels_per_stage) {
    if (c < 1) throw Error(ErrorCode::kInvalidArgument, "channel counts must be >= 1");
  }
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "kernel_size must be odd and positive");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw Error(ErrorCode::kInvalidArgument, "momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "weight_decay must be >= 0");
}

PixelNetConfig PixelNetConfig::text_block() {
  PixelNetConfig c;
  c.stage_count = 4;
  c.channels_per_stage = {8, 16, 16, 16};
  return c;
}

PixelNetConfig PixelNetConfig::character_centroid() {
  PixelNetConfig c;
  c.stage_count = 3;
  c.channels_per_stage = {8, 16, 16};
  c.kernel_size = 5;
  return c;
}

PixelNet::PixelNet(PixelNetConfig config) : config_(std::move(config)) {
  config_.validate();
  build_layout();
  std::mt19937_64 rng(config_.seed);
  auto fill_uniform = [&](std::size_t begin, std::size_t count, int fan_in) {
    const double a = std::sqrt(3.0 / fan_in);
    std::uniform_real_distribution<double> dist(-a, a);
    for (std::size_t i = 0; i < count; ++i) params_[begin + i] = dist(rng);
  };
  const int k2 = config_.kernel_size * config_.kernel_size;
  for (const StageLayout& s : layout_) {
    fill_uniform(s.conv_weights, static_cast<std::size_t>(s.out_channels) * s.in_channels * k2, s.in_channels * k2);
  }
  for (const StageLayout& s : layout_) fill_uniform(s.side_weights, s.out_channels, s.out_channels);
  fill_uniform(fuse_weights_, layout_.size(), static_cast<int>(layout_.size()));
}

PixelNet::PixelNet(PixelNetConfig config, std::vector<double> parameters) : config_(std::move(config)) {
  config_.validate();
  build_layout();
  if (parameters.size() != params_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "parameter count does not match configuration");
  }
  params_ = std::move(parameters);
}

PixelNet PixelNet::zeros(PixelNetConfig config) {
  PixelNet net(std::move(config));
  std::fill(net.params_.begin(), net.params_.end(), 0.0);
  return net;
}

void PixelNet::build_layout() {
  const std::size_t k2 = static_cast<std::size_t>(config_.kernel_size) * config_.kernel_size;
  layout_.clear();
  std::size_t offset = 0;
  int in_channels = 1;
  for (int c : config_.channels_per_stage) {
    StageLayout s;
    s.in_channels = in_channels;
    s.out_channels = c;
    s.conv_weights = offset;
    offset += static_cast<std::size_t>(c) * in_channels * k2;
    s.conv_bias = offset;
    offset += c;
    layout_.push_back(s);
    in_channels = c;
  }
  for (StageLayout& s : layout_) {
    s.side_weights = offset;
    offset += s.out_channels;
    s.side_bias = offset;
    offset += 1;
  }
  fuse_weights_ = offset;
  offset += layout_.size() + 1;
  params_.assign(offset, 0.0);
}

GroundTruthMap::GroundTruthMap(ProbabilityMap map) : map_(std::move(map)) {
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (map_[i] != 0.0 && map_[i] != 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "ground-truth maps must be binary");
    }
  }
}

std::size_t GroundTruthMap::positive_count() const {
  return static_cast<std::size_t>(std::count(map_.values().begin(), map_.values().end(), 1.0));
}

namespace {

struct Tensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> values;

  Tensor() = default;
  Tensor(int c, int h, int w) : channels(c), height(h), width(w), values(static_cast<std::size_t>(c) * h * w, 0.0) {}

  std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
  double* plane(int c) { return values.data() + c * plane_size(); }
  const double* plane(int c) const { return values.data() + c * plane_size(); }
};

void conv_forward(const Tensor& in, const double* weights, const double* bias, int out_channels, int k,
                  Tensor& out) {
  out = Tensor(out_channels, in.height, in.width);
  const int pad = k / 2;
  const int h = in.height;
  const int w = in.width;
  for (int o = 0; o < out_channels; ++o) {
    double* dst = out.plane(o);
    std::fill(dst, dst + out.plane_size(), bias[o]);
    for (int i = 0; i < in.channels; ++i) {
      const double* src = in.plane(i);
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - pad;
        const int y_begin = std::max(0, -dy);
        const int y_end = std::min(h, h - dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - pad;
          const double wgt = weights[((static_cast<std::size_t>(o) * in.channels + i) * k + ky) * k + kx];
          const int x_begin = std::max(0, -dx);
          const int x_end = std::min(w, w - dx);
          for (int y = y_begin; y < y_end; ++y) {
            double* row = dst + static_cast<std::size_t>(y) * w;
            const double* srow = src + static_cast<std::size_t>(y + dy) * w + dx;
            for (int x = x_begin; x < x_end; ++x) row[x] += wgt * srow[x];
          }
        }
      }
    }
  }
}

void conv_backward(const Tensor& in, const double* weights, const Tensor& d_out, int k, double* d_weights,
                   double* d_bias, Tensor* d_in) {
  const int pad = k / 2;
  const int h = in.height;
  const int w = in.width;
  if (d_in) *d_in = Tensor(in.channels, h, w);
  for (int o = 0; o < d_out.channels; ++o) {
    const double* g = d_out.plane(o);
    double bias_sum = 0.0;
    for (std::size_t j = 0; j < d_out.plane_size(); ++j) bias_sum += g[j];
    d_bias[o] += bias_sum;
    for (int i = 0; i < in.channels; ++i) {
      const double* src = in.plane(i);
      double* dsrc = d_in ? d_in->plane(i) : nullptr;
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - pad;
        const int y_begin = std::max(0, -dy);
        const int y_end = std::min(h, h - dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - pad;
          const std::size_t widx = ((static_cast<std::size_t>(o) * in.channels + i) * k + ky) * k + kx;
          const double wgt = weights[widx];
          const int x_begin = std::max(0, -dx);
          const int x_end = std::min(w, w - dx);
          double acc = 0.0;
          for (int y = y_begin; y < y_end; ++y) {
            const double* grow = g + static_cast<std::size_t>(y) * w;
            const double* srow = src + static_cast<std::size_t>(y + dy) * w + dx;
            for (int x = x_begin; x < x_end; ++x) acc += grow[x] * srow[x];
            if (dsrc) {
              double* drow = dsrc + static_cast<std::size_t>(y + dy) * w + dx;
              for (int x = x_begin; x < x_end; ++x) drow[x] += wgt * grow[x];
            }
          }
          d_weights[widx] += acc;
        }
      }
    }
  }
}

// 2x2 max-pool; `argmax` stores the winning source offset within the plane.
void pool_forward(const Tensor& in, Tensor& out, std::vector<int>& argmax) {
  out = Tensor(in.channels, in.height / 2, in.width / 2);
  argmax.assign(out.values.size(), 0);
  for (int c = 0; c < in.channels; ++c) {
    const double* src = in.plane(c);
    double* dst = out.plane(c);
    int* arg = argmax.data() + c * out.plane_size();
    for (int y = 0; y < out.height; ++y) {
      for (int x = 0; x < out.width; ++x) {
        int best = (2 * y) * in.width + 2 * x;
        for (int oy = 0; oy < 2; ++oy) {
          for (int ox = 0; ox < 2; ++ox) {
            const int idx = (2 * y + oy) * in.width + 2 * x + ox;
            if (src[idx] > src[best]) best = idx;
          }
        }
        dst[y * out.width + x] = src[best];
        arg[y * out.width + x] = best;
      }
    }
  }
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct ForwardState {
  std::vector<Tensor> inputs;
  std::vector<Tensor> activations;
  std::vector<std::vector<double>> sides;
  std::vector<std::vector<int>> pool_argmax;
  std::vector<double> probability;
  int height = 0;
  int width = 0;
};

void check_divisible(const PixelNet& net, int width, int height) {
  const int d = net.size_divisor();
  if (width % d != 0 || height % d != 0) {
    throw Error(ErrorCode::kUnpaddedInput,
                "unpadded input: dimensions must be multiples of " + std::to_string(d));
  }
}

// Maps intensities to [-1, 1] and zero-pads right/bottom to `padded` size.
Tensor network_input(const GrayImage& image, int padded_width, int padded_height) {
  Tensor input(1, padded_height, padded_width);
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      input.values[static_cast<std::size_t>(y) * padded_width + x] = image.at(x, y) / 127.5 - 1.0;
    }
  }
  return input;
}

Tensor padded_input(const PixelNet& net, const GrayImage& image) {
  const int d = net.size_divisor();
  return network_input(image, (image.width() + d - 1) / d * d, (image.height() + d - 1) / d * d);
}

ForwardState run_forward(const PixelNet& net, Tensor input) {
  check_divisible(net, input.width, input.height);
  const auto& layout = net.layout();
  const auto params = net.parameters();
  const int k = net.config().kernel_size;
  const int stages = static_cast<int>(layout.size());

  ForwardState st;
  st.height = input.height;
  st.width = input.width;
  st.inputs.resize(stages);
  st.activations.resize(stages);
  st.sides.resize(stages);
  st.pool_argmax.resize(stages);

  st.inputs[0] = std::move(input);

  for (int s = 0; s < stages; ++s) {
    const auto& L = layout[s];
    Tensor& act = st.activations[s];
    conv_forward(st.inputs[s], &params[L.conv_weights], &params[L.conv_bias], L.out_channels, k, act);
    for (double& v : act.values) v = std::max(v, 0.0);

    std::vector<double>& side = st.sides[s];
    side.assign(act.plane_size(), params[L.side_bias]);
    for (int c = 0; c < act.channels; ++c) {
      const double wgt = params[L.side_weights + c];
      const double* a = act.plane(c);
      for (std::size_t j = 0; j < side.size(); ++j) side[j] += wgt * a[j];
    }
    if (s + 1 < stages) pool_forward(act, st.inputs[s + 1], st.pool_argmax[s]);
  }

  const double fuse_bias = params[net.fuse_bias()];
  st.probability.assign(static_cast<std::size_t>(st.height) * st.width, 0.0);
  for (int y = 0; y < st.height; ++y) {
    for (int x = 0; x < st.width; ++x) {
      double z = fuse_bias;
      for (int s = 0; s < stages; ++s) {
        const int sw = st.width >> s;
        z += params[net.fuse_weights() + s] * st.sides[s][static_cast<std::size_t>(y >> s) * sw + (x >> s)];
      }
      st.probability[static_cast<std::size_t>(y) * st.width + x] = sigmoid(z);
    }
  }
  return st;
}

}  // namespace

ProbabilityMap forward(const PixelNet& net, const GrayImage& image) {
  check_divisible(net, image.width(), image.height());
  ForwardState st = run_forward(net, network_input(image, image.width(), image.height()));
  return ProbabilityMap(st.width, st.height, std::move(st.probability));
}

ProbabilityMap forward_padded(const PixelNet& net, const GrayImage& image) {
  const ForwardState st = run_forward(net, padded_input(net, image));
  ProbabilityMap out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) out.at(x, y) = st.probability[static_cast<std::size_t>(y) * st.width + x];
  }
  return out;
}

namespace {

double pixel_loss(double p, double y) {
  const double pc = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
}

void check_truth(const GrayImage& image, const GroundTruthMap& truth) {
  if (image.width() != truth.width() || image.height() != truth.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "image and ground truth dimensions differ");
  }
}

}  // namespace

double loss(const PixelNet& net, const GrayImage& image, const GroundTruthMap& truth) {
  check_truth(image, truth);
  const ProbabilityMap p = forward_padded(net, image);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += pixel_loss(p[i], truth.map()[i]);
  return total / static_cast<double>(p.size());
}

LossGradient loss_and_gradient(const PixelNet& net, const GrayImage& image, const GroundTruthMap& truth) {
  check_truth(image, truth);
  const ForwardState st = run_forward(net, padded_input(net, image));
  const auto& layout = net.layout();
  const auto params = net.parameters();
  const int k = net.config().kernel_size;
  const int stages = static_cast<int>(layout.size());
  const double n = static_cast<double>(image.size());

  LossGradient out;
  out.gradient.assign(net.parameter_count(), 0.0);
  std::vector<double>& grad = out.gradient;

  // Gradient w.r.t. the fused logit; clamped pixels contribute nothing.
  std::vector<double> dz(st.probability.size(), 0.0);
  double total = 0.0;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const std::size_t j = static_cast<std::size_t>(y) * st.width + x;
      const double p = st.probability[j];
      const double t = truth.map().at(x, y);
      total += pixel_loss(p, t);
      if (p > kProbabilityClamp && p < 1.0 - kProbabilityClamp) dz[j] = (p - t) / n;
    }
  }
  out.loss = total / n;

  std::vector<std::vector<double>> d_sides(stages);
  for (int s = 0; s < stages; ++s) d_sides[s].assign(st.sides[s].size(), 0.0);
  double d_fuse_bias = 0.0;
  for (int y = 0; y < st.height; ++y) {
    for (int x = 0; x < st.width; ++x) {
      const double g = dz[static_cast<std::size_t>(y) * st.width + x];
      if (g == 0.0) continue;
      d_fuse_bias += g;
      for (int s = 0; s < stages; ++s) {
        const std::size_t j = static_cast<std::size_t>(y >> s) * (st.width >> s) + (x >> s);
        grad[net.fuse_weights() + s] += g * st.sides[s][j];
        d_sides[s][j] += params[net.fuse_weights() + s] * g;
      }
    }
  }
  grad[net.fuse_bias()] += d_fuse_bias;

  Tensor d_next;  // gradient w.r.t. the input of stage s + 1
  for (int s = stages - 1; s >= 0; --s) {
    const auto& L = layout[s];
    const Tensor& act = st.activations[s];
    Tensor d_act(act.channels, act.height, act.width);
    const std::vector<double>& ds = d_sides[s];
    double side_bias = 0.0;
    for (double g : ds) side_bias += g;
    grad[L.side_bias] += side_bias;
    for (int c = 0; c < act.channels; ++c) {
      const double* a = act.plane(c);
      double* da = d_act.plane(c);
      const double wgt = params[L.side_weights + c];
      double acc = 0.0;
      for (std::size_t j = 0; j < ds.size(); ++j) {
        acc += ds[j] * a[j];
        da[j] = wgt * ds[j];
      }
      grad[L.side_weights + c] += acc;
    }
    if (s + 1 < stages) {
      const std::vector<int>& arg = st.pool_argmax[s];
      for (int c = 0; c < act.channels; ++c) {
        double* da = d_act.plane(c);
        const double* dn = d_next.plane(c);
        const int* ac = arg.data() + c * d_next.plane_size();
        for (std::size_t j = 0; j < d_next.plane_size(); ++j) da[ac[j]] += dn[j];
      }
    }
    for (std::size_t j = 0; j < d_act.values.size(); ++j) {
      if (act.values[j] <= 0.0) d_act.values[j] = 0.0;
    }
    Tensor d_in;
    conv_backward(st.inputs[s], &params[L.conv_weights], d_act, k, &grad[L.conv_weights], &grad[L.conv_bias],
                  s > 0 ? &d_in : nullptr);
    d_next = std::move(d_in);
  }
  return out;
}

PixelNet train(PixelNet net, std::span<const TrainingExample> corpus, const TrainOptions& options) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyInput, "training corpus is empty");
  if (options.iterations < 0) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 0");
  const PixelNetConfig& cfg = net.config();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  std::vector<double> velocity(net.parameter_count(), 0.0);
  auto params = net.parameters();

  double window = 0.0;
  int window_count = 0;
  const int interval = std::max(1, options.log_interval);
  for (int it = 1; it <= options.iterations; ++it) {
    const TrainingExample& ex = corpus[pick(rng)];
    const LossGradient lg = loss_and_gradient(net, ex.image, ex.truth);
    if (!std::isfinite(lg.loss)) {
      throw Error(ErrorCode::kNumeric, "non-finite loss at iteration " + std::to_string(it));
    }
    for (std::size_t j = 0; j < params.size(); ++j) {
      velocity[j] = cfg.momentum * velocity[j] - cfg.learning_rate * (lg.gradient[j] + cfg.weight_decay * params[j]);
      params[j] += velocity[j];
    }
    window += lg.loss;
    ++window_count;
    if (it % interval == 0 || it == options.iterations) {
      if (options.on_log) options.on_log(it, window / window_count);
      window = 0.0;
      window_count = 0;
    }
  }
  return net;
}

GroundTruthMap make_block_gt(int width, int height, std::span<const OrientedRect> boxes) {
  GroundTruthMap gt(width, height);
  for (const OrientedRect& box : boxes) {
    const AxisBox hull = axis_hull(box);
    const int x0 = std::max(0, static_cast<int>(std::floor(hull.x0)));
    const int y0 = std::max(0, static_cast<int>(std::floor(hull.y0)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(hull.x1)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(hull.y1)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (box.contains({static_cast<double>(x), static_cast<double>(y)}, 1e-9)) gt.set(x, y);
      }
    }
  }
  return gt;
}

GroundTruthMap make_centroid_gt(int width, int height, std::span<const CharacterMark> chars) {
  GroundTruthMap gt(width, height);
  for (const CharacterMark& c : chars) {
    if (!(c.height > 0.0)) throw Error(ErrorCode::kInvalidArgument, "character height must be positive");
    const double r = kCentroidRadiusFraction * c.height;
    const int x0 = std::max(0, static_cast<int>(std::floor(c.centroid.x - r)));
    const int y0 = std::max(0, static_cast<int>(std::floor(c.centroid.y - r)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(c.centroid.x + r)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(c.centroid.y + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (std::hypot(x - c.centroid.x, y - c.centroid.y) < r) gt.set(x, y);
      }
    }
  }
  return gt;
}

ProbabilityMap multi_scale_saliency(const PixelNet& net, const GrayImage& image, std::span<const int> heights) {
  if (heights.empty()) throw Error(ErrorCode::kEmptyInput, "empty heights list");
  ProbabilityMap sum(image.width(), image.height(), 0.0);
  for (int target : heights) {
    if (target < 1) throw Error(ErrorCode::kInvalidArgument, "scale heights must be positive");
    const double scale = static_cast<double>(target) / image.height();
    const int width = std::max(1, static_cast<int>(std::lround(image.width() * scale)));
    const GrayImage scaled = resize_bilinear(image, width, target);
    const ProbabilityMap p = resize_bilinear(forward_padded(net, scaled), image.width(), image.height());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += p[i];
  }
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] /= static_cast<double>(heights.size());
  return sum;
}

}  // namespace textdet
