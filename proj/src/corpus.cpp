#include "textdet/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <regex>

#include "textdet/eval.hpp"
#include "textdet/raster_io.hpp"
#include "textdet/serialize.hpp"

namespace textdet {

namespace {

std::string stem_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d", index);
  return buf;
}

std::vector<GroundTruthEntry> entries(const std::vector<OrientedRect>& boxes) {
  std::vector<GroundTruthEntry> out;
  for (const OrientedRect& b : boxes) out.push_back({b, false});
  return out;
}

}  // namespace

GrayImage truth_to_image(const GroundTruthMap& truth) {
  GrayImage out(truth.width(), truth.height());
  for (int y = 0; y < truth.height(); ++y) {
    for (int x = 0; x < truth.width(); ++x) out.at(x, y) = truth.positive(x, y) ? 255 : 0;
  }
  return out;
}

GroundTruthMap image_to_truth(const GrayImage& image) {
  GroundTruthMap out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (image.at(x, y) > 127) out.set(x, y);
    }
  }
  return out;
}

CorpusSummary write_corpus(const std::filesystem::path& dir, const SynthSpec& spec, int count,
                           const PatchOptions& patches) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "count must be positive");
  namespace fs = std::filesystem;
  for (const char* sub : {"block", "centroid", "saliency", "centroid_map", "gt", "gt_words"}) fs::create_directories(dir / sub);
  std::ofstream manifest(dir / "scenes.jsonl");
  if (!manifest) throw Error(ErrorCode::kIo, "cannot write " + (dir / "scenes.jsonl").string());

  CorpusSummary summary;
  const std::vector<CorpusItem> corpus = generate_corpus(spec, count);
  for (int i = 0; i < count; ++i) {
    const CorpusItem& item = corpus[i];
    const std::string name = stem_name(i);
    save_image(dir / "block" / (name + ".pgm"), item.scene.image);
    save_image(dir / "block" / (name + ".gt.pgm"), truth_to_image(item.block_gt));
    save_image(dir / "saliency" / (name + ".pgm"), truth_to_image(item.block_gt));
    save_image(dir / "centroid_map" / (name + ".pgm"), truth_to_image(item.centroid_gt));
    save_ground_truth(dir / "gt" / (name + ".txt"), entries(item.scene.line_boxes));
    save_ground_truth(dir / "gt_words" / (name + ".txt"), entries(item.scene.words));
    manifest << scene_to_json(name, item.scene) << '\n';

    PatchOptions options = patches;
    options.seed = scene_seed(patches.seed ^ spec.seed, i);
    for (const TrainingExample& ex : centroid_patches(item.scene, options)) {
      const std::string patch = stem_name(summary.patches++);
      save_image(dir / "centroid" / (patch + ".pgm"), ex.image);
      save_image(dir / "centroid" / (patch + ".gt.pgm"), truth_to_image(ex.truth));
    }
    ++summary.scenes;
  }
  if (!manifest) throw Error(ErrorCode::kIo, "write failed: " + (dir / "scenes.jsonl").string());
  return summary;
}

std::vector<TrainingExample> load_training_pairs(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kMissingFile, "missing corpus directory: " + dir.string());
  static const std::regex image_name(R"(\d+\.pgm)");
  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && std::regex_match(entry.path().filename().string(), image_name)) {
      images.push_back(entry.path());
    }
  }
  std::sort(images.begin(), images.end());
  if (images.empty()) throw Error(ErrorCode::kEmptyInput, "no NNNN.pgm / NNNN.gt.pgm pairs in " + dir.string());

  std::vector<TrainingExample> out;
  for (const fs::path& image_path : images) {
    const fs::path truth_path = dir / (image_path.stem().string() + ".gt.pgm");
    if (!fs::exists(truth_path)) {
      throw Error(ErrorCode::kMissingFile, "missing ground truth for " + image_path.string() + ": " + truth_path.string());
    }
    GrayImage image = load_image(image_path);
    GrayImage truth = load_image(truth_path);
    if (image.width() != truth.width() || image.height() != truth.height()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "size mismatch in pair " + image_path.string() + " / " + truth_path.string());
    }
    out.push_back({std::move(image), image_to_truth(truth)});
  }
  return out;
}

}  // namespace textdet
