#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "textdet/candidates.hpp"
#include "textdet/saliency.hpp"

namespace textdet {

struct FilterParams {
  int min_centroids = 2;
  double min_avg_score = 0.6;
  double max_mu = std::numbers::pi / 32;
  double max_sigma = std::numbers::pi / 16;
  double nms_overlap = 0.5;
  double peak_floor = 0.3;
  double peak_radius_fraction = 0.25;
  int normalized_height = 32;
  int min_normalized_width = 8;
  double word_gap_factor = 1.5;
  double word_min_gap = 8.0;
  bool words = false;

  void validate() const;
};

struct ScoredPoint {
  Point position;  // pixel coordinates of the normalized (horizontal) frame
  double score = 0.0;
};

/// Centroids of one candidate, sorted by x in the normalized frame.
struct CentroidSet {
  std::vector<ScoredPoint> points;
  int frame_width = 0;
  int frame_height = 0;

  int count() const { return static_cast<int>(points.size()); }
  double score_sum() const;
};

struct Detection {
  OrientedRect box;
  double score = 0.0;
  std::vector<OrientedRect> words;
  CentroidSet centroids;
  int candidate = -1;
};

int normalized_width(const OrientedRect& box, const FilterParams& params);

/// Width-proportional upright raster of the oriented box, height
/// params.normalized_height, sampled bilinearly through the inverse map.
GrayImage normalize_candidate(const GrayImage& image, const OrientedRect& box, const FilterParams& params = {});
inline GrayImage normalize_candidate(const GrayImage& image, const LineCandidate& candidate,
                                     const FilterParams& params = {}) {
  return normalize_candidate(image, candidate.box, params);
}

/// Maps between normalized-frame pixel coordinates and image coordinates.
Point normalized_to_image(const OrientedRect& box, int frame_width, int frame_height, Point p);
Point image_to_normalized(const OrientedRect& box, int frame_width, int frame_height, Point p);

/// Local maxima >= peak_floor, each strictly dominating its Chebyshev
/// neighbourhood (equal values resolved by smaller row-major index).
CentroidSet extract_centroids(const ProbabilityMap& centroid_map, const FilterParams& params = {});

bool intensity_criterion(const CentroidSet& centroids, const FilterParams& params = {});

struct AngleStats {
  double mu = 0.0;
  double sigma = 0.0;
};

/// Mean and population deviation of |orientation| over all unordered
/// centroid pairs. Throws kInvalidArgument ("criterion undefined") below 2.
AngleStats centroid_angle_stats(const CentroidSet& centroids);
bool geometric_criterion(const CentroidSet& centroids, const FilterParams& params = {});

/// Greedy rotated-IoU suppression by descending score, stable on ties.
std::vector<Detection> nms(std::vector<Detection> detections, double overlap);

std::vector<OrientedRect> word_partition(const Detection& detection, const CentroidSet& centroids,
                                         const FilterParams& params = {});

/// Produces the centroid probability map for a normalized candidate raster.
using CentroidMapper = std::function<ProbabilityMap(const GrayImage& normalized, const LineCandidate& candidate)>;

CentroidMapper net_mapper(const PixelNet& net);

/// Ground-truth disks of the characters whose centroid lies inside the
/// candidate box, drawn in the normalized frame.
CentroidMapper oracle_mapper(std::vector<CharacterMark> chars);

struct CandidateVerdict {
  CentroidSet centroids;
  bool intensity = false;
  bool geometric = false;
};

std::vector<Detection> filter_pipeline(const GrayImage& image, std::span<const LineCandidate> candidates,
                                       const CentroidMapper& mapper, const FilterParams& params = {},
                                       std::vector<CandidateVerdict>* verdicts = nullptr);

}  // namespace textdet
