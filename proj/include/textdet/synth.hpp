#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "textdet/filtering.hpp"
#include "textdet/saliency.hpp"

namespace textdet {

template <typename T>
struct Range {
  T lo{};
  T hi{};
};

struct SynthSpec {
  int width = 200;
  int height = 200;
  Range<int> line_count{1, 3};
  Range<int> chars_per_line{3, 6};
  Range<double> char_height{12.0, 20.0};
  Range<double> orientation{-75.0 * std::numbers::pi / 180, 75.0 * std::numbers::pi / 180};
  double noise_stddev = 6.0;
  /// Chance that the gap after a character is a word break.
  double word_break_probability = 0.25;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthScene {
  GrayImage image;
  std::vector<OrientedRect> line_boxes;
  std::vector<CharacterMark> chars;
  std::vector<int> char_line;  // line index of every char
  std::vector<OrientedRect> words;
  std::vector<int> word_line;
};

/// Throws kSpecTooDense when a line cannot be placed in 100 attempts.
SynthScene generate_scene(const SynthSpec& spec);

struct CorpusItem {
  SynthScene scene;
  GroundTruthMap block_gt;
  GroundTruthMap centroid_gt;
};

/// Scene i is generated from a seed derived from spec.seed and i.
std::vector<CorpusItem> generate_corpus(const SynthSpec& spec, int count);

std::uint64_t scene_seed(std::uint64_t base, int index);

struct PatchOptions {
  FilterParams filter;
  /// Per-side padding of line boxes, as fractions of the line thickness.
  Range<double> length_padding{0.0, 0.5};
  Range<double> thickness_padding{0.0, 0.15};
  int negatives_per_scene = 1;
  std::uint64_t seed = 1;
};

/// Normalized line patches with centroid ground truth in the patch frame,
/// plus background patches with empty ground truth.
std::vector<TrainingExample> centroid_patches(const SynthScene& scene, const PatchOptions& options);

}  // namespace textdet
