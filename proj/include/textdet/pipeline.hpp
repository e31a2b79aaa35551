#pragma once

#include <optional>
#include <span>
#include <vector>

#include "textdet/config.hpp"

namespace textdet {

/// Block-net saliency: averaged over config.scales, or a single native-size
/// pass when that list is empty.
ProbabilityMap compute_saliency(const PixelNet& net, const GrayImage& image, std::span<const int> scales);

struct PipelineResult {
  std::vector<BlockTrace> traces;
  std::vector<LineCandidate> candidates;
  std::vector<CandidateVerdict> verdicts;
  std::vector<Detection> detections;
};

/// Candidates, then centroid filtering when a mapper is given. Without one
/// every candidate becomes a detection scored by its member count, NMS
/// still applies.
PipelineResult run_pipeline(const GrayImage& image, const ProbabilityMap& saliency, const CentroidMapper* mapper,
                            const RunConfig& config);

/// Samples an image-frame centroid map under each candidate's box.
CentroidMapper image_map_mapper(ProbabilityMap centroid_map);

/// Copy of the image with box outlines drawn at intensity 255.
GrayImage render_overlay(const GrayImage& image, std::span<const OrientedRect> boxes);

}  // namespace textdet
