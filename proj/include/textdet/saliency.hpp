#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "textdet/geometry.hpp"
#include "textdet/imaging.hpp"

namespace textdet {

/// Topology and optimiser settings of a skip-fusion pixel-labelling network.
struct PixelNetConfig {
  int stage_count = 3;
  std::vector<int> channels_per_stage{8, 16, 16};
  int kernel_size = 3;
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::uint64_t seed = 1;

  void validate() const;

  static PixelNetConfig text_block();
  static PixelNetConfig character_centroid();

  friend bool operator==(const PixelNetConfig&, const PixelNetConfig&) = default;
};

// Each stage is conv(k x k, zero pad) -> ReLU -> 2x2 max-pool. The pre-pool
// activation of every stage also feeds a 1x1 side convolution to a single
// channel, which is nearest-upsampled to input resolution. The side maps are
// fused by a final 1x1 convolution followed by a sigmoid.
//
// Parameters live in one flat array, in this order:
//   for each stage: conv weights [out][in][k][k], conv bias [out]
//   for each stage: side weights [channels], side bias [1]
//   fuse weights [stage_count], fuse bias [1]
class PixelNet {
 public:
  struct StageLayout {
    int in_channels = 0;
    int out_channels = 0;
    std::size_t conv_weights = 0;
    std::size_t conv_bias = 0;
    std::size_t side_weights = 0;
    std::size_t side_bias = 0;
  };

  /// Seeded uniform initialisation in [-a, a], a = sqrt(3 / fan_in); biases 0.
  explicit PixelNet(PixelNetConfig config);
  PixelNet(PixelNetConfig config, std::vector<double> parameters);

  static PixelNet zeros(PixelNetConfig config);

  const PixelNetConfig& config() const { return config_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  std::size_t parameter_count() const { return params_.size(); }
  const std::vector<StageLayout>& layout() const { return layout_; }
  std::size_t fuse_weights() const { return fuse_weights_; }
  std::size_t fuse_bias() const { return fuse_weights_ + layout_.size(); }

  /// Inputs must have both dimensions divisible by this.
  int size_divisor() const { return 1 << config_.stage_count; }

 private:
  void build_layout();

  PixelNetConfig config_;
  std::vector<StageLayout> layout_;
  std::size_t fuse_weights_ = 0;
  std::vector<double> params_;
};

/// Binary {0, 1} training target.
class GroundTruthMap {
 public:
  GroundTruthMap() = default;
  explicit GroundTruthMap(ProbabilityMap map);
  GroundTruthMap(int width, int height) : map_(width, height, 0.0) {}

  int width() const { return map_.width(); }
  int height() const { return map_.height(); }
  const ProbabilityMap& map() const { return map_; }
  bool positive(int x, int y) const { return map_.at(x, y) > 0.5; }
  void set(int x, int y) { map_.at(x, y) = 1.0; }
  std::size_t positive_count() const;

  friend bool operator==(const GroundTruthMap&, const GroundTruthMap&) = default;

 private:
  ProbabilityMap map_;
};

/// Throws kUnpaddedInput unless both dimensions divide by size_divisor().
ProbabilityMap forward(const PixelNet& net, const GrayImage& image);

/// Zero-pads right/bottom to the divisor, runs forward, crops back.
ProbabilityMap forward_padded(const PixelNet& net, const GrayImage& image);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

inline constexpr double kProbabilityClamp = 1e-7;

/// Mean binary cross-entropy over the image pixels (padding excluded) and its
/// gradient with respect to every parameter.
LossGradient loss_and_gradient(const PixelNet& net, const GrayImage& image, const GroundTruthMap& truth);
double loss(const PixelNet& net, const GrayImage& image, const GroundTruthMap& truth);

struct TrainingExample {
  GrayImage image;
  GroundTruthMap truth;
};

struct TrainOptions {
  int iterations = 0;
  int log_interval = 100;
  /// Receives (iteration, mean sampled loss since the previous report).
  std::function<void(int, double)> on_log;
};

/// Momentum SGD with weight decay; one seeded example per iteration.
PixelNet train(PixelNet net, std::span<const TrainingExample> corpus, const TrainOptions& options);

/// 1 where the pixel center lies inside any box.
GroundTruthMap make_block_gt(int width, int height, std::span<const OrientedRect> boxes);

struct CharacterMark {
  Point centroid;
  double height = 0.0;
};

inline constexpr double kCentroidRadiusFraction = 0.15;

/// 1 where the pixel center is closer than 0.15 x height to some centroid.
GroundTruthMap make_centroid_gt(int width, int height, std::span<const CharacterMark> chars);

/// Averages forward passes over proportional rescalings to each height.
ProbabilityMap multi_scale_saliency(const PixelNet& net, const GrayImage& image, std::span<const int> heights);

void save_model(const std::filesystem::path& path, const PixelNet& net);
PixelNet load_model(const std::filesystem::path& path);

}  // namespace textdet
