#pragma once

#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "textdet/geometry.hpp"

namespace textdet {

struct GroundTruthEntry {
  OrientedRect box;
  bool difficult = false;
};

/// A box to be scored; detections carry their confidence.
struct ScoredBox {
  OrientedRect box;
  double score = 0.0;
};

struct MatchPair {
  int detection = 0;
  int truth = 0;
};

/// One image's matching outcome.
struct ImageMatches {
  std::string name;
  std::vector<MatchPair> pairs;
  int detections = 0;
  int truths = 0;            // non-difficult entries
  int difficult_truths = 0;
  /// Detections matched to difficult entries; excluded from the precision count.
  int ignored_detections = 0;
};

struct RotatedProtocol {
  double min_overlap = 0.5;
  double max_angle_diff = std::numbers::pi / 8;
};

struct AxisProtocol {
  double min_iou = 0.5;
};

/// Greedy one-to-one matching by descending detection score (stable on ties).
ImageMatches match_rotated(std::span<const ScoredBox> detections, std::span<const GroundTruthEntry> truths,
                           const RotatedProtocol& protocol = {});
ImageMatches match_axis_aligned(std::span<const ScoredBox> detections, std::span<const GroundTruthEntry> truths,
                                const AxisProtocol& protocol = {});

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

Metrics metrics_from_counts(long long matches, long long detections, long long truths);

struct EvalReport {
  Metrics global;
  long long matches = 0;
  long long detections = 0;
  long long truths = 0;
  std::vector<ImageMatches> images;
  std::vector<Metrics> per_image;
};

EvalReport report(std::span<const ImageMatches> images);

/// One entry per line: `xc yc length thickness angle difficult`; blank lines
/// and lines starting with '#' are skipped.
std::vector<GroundTruthEntry> parse_ground_truth(const std::string& text, const std::string& source = "<text>");
std::vector<GroundTruthEntry> load_ground_truth(const std::filesystem::path& path);
std::string format_ground_truth(std::span<const GroundTruthEntry> entries);
void save_ground_truth(const std::filesystem::path& path, std::span<const GroundTruthEntry> entries);

}  // namespace textdet
