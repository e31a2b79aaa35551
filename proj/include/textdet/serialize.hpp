#pragma once

#include <span>
#include <string>
#include <vector>

#include "textdet/candidates.hpp"
#include "textdet/eval.hpp"
#include "textdet/filtering.hpp"
#include "textdet/synth.hpp"

namespace textdet {

inline constexpr int kJsonSchema = 1;

/// `{schema, image, detections: [{corners, angle, score, words?}]}`.
std::string detections_to_json(const std::string& image, std::span<const Detection> detections, bool with_words);

struct DetectionRecord {
  ScoredBox line;
  std::vector<OrientedRect> words;
};

struct DetectionFile {
  std::string image;
  std::vector<DetectionRecord> detections;
};

DetectionFile parse_detections_json(const std::string& text, const std::string& source = "<text>");

/// One manifest line holding a scene's ground truth.
std::string scene_to_json(const std::string& name, const SynthScene& scene);

std::string report_to_json(const EvalReport& report, std::span<const std::string> names);

/// Blocks, components and candidates of a traced run.
std::string trace_to_json(std::span<const BlockTrace> traces);

}  // namespace textdet
