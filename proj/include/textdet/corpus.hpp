#pragma once

#include <filesystem>
#include <vector>

#include "textdet/synth.hpp"

namespace textdet {

// On-disk corpus written by write_corpus:
//   block/NNNN.pgm, block/NNNN.gt.pgm        scene and text-block truth
//   centroid/NNNN.pgm, centroid/NNNN.gt.pgm  normalized line patches
//   saliency/NNNN.pgm                        block truth as a saliency map
//   centroid_map/NNNN.pgm                    image-frame centroid truth
//   gt/NNNN.txt, gt_words/NNNN.txt           line and word boxes
//   scenes.jsonl                             all ground truth, one scene per line
// Truth rasters store 0 / 255.

struct CorpusSummary {
  int scenes = 0;
  int patches = 0;
};

CorpusSummary write_corpus(const std::filesystem::path& dir, const SynthSpec& spec, int count,
                           const PatchOptions& patches = {});

/// Pairs `NNNN.pgm` / `NNNN.gt.pgm` in name order. Throws kEmptyInput when
/// there are none and kDimensionMismatch naming the pair on a size mismatch.
std::vector<TrainingExample> load_training_pairs(const std::filesystem::path& dir);

GrayImage truth_to_image(const GroundTruthMap& truth);
GroundTruthMap image_to_truth(const GrayImage& image);

}  // namespace textdet
