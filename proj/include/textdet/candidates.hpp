#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "textdet/blocks.hpp"
#include "textdet/mser.hpp"
#include "textdet/orientation.hpp"

namespace textdet {

struct PairRule {
  double max_height_ratio = 1.5;               // H(a)/H(b) in (1/r, r)
  double max_angle_gap = std::numbers::pi / 12; // |O(a,b) - theta_r| < gap
};

/// Orientation of the centroid-to-centroid segment, in [-pi/2, pi/2).
double pair_orientation(const Component& a, const Component& b);

bool pair_compatible(const Component& a, const Component& b, double theta, const PairRule& rule = {});

struct LineGroup {
  std::vector<int> members;  // indices into the block's component list, ascending
  Point center;              // mean of member centroids
  int block_id = 0;
};

/// Connected components of the compatibility graph, ordered by smallest member.
std::vector<LineGroup> group_components(std::span<const Component> components, double theta, int block_id = 0,
                                        const PairRule& rule = {});

inline constexpr double kAnchorBand = 0.5;

/// Boundary pixels of the block within `band` of the line through the group
/// center along theta; if none, the two crossings of that line with the
/// block bbox.
std::vector<Point> anchor_points(const LineGroup& group, double theta, const TextBlock& block,
                                 double band = kAnchorBand);

struct LineCandidate {
  OrientedRect box;
  LineGroup group;
  std::vector<Point> anchors;
  double orientation = 0.0;  // theta_r of the block
};

/// Minimum-area rectangle over member pixel corners and the anchors.
LineCandidate make_candidate(const LineGroup& group, std::span<const Component> components,
                             std::span<const Point> anchors, double orientation = 0.0);

struct CandidateParams {
  double block_threshold = 0.2;
  int min_block_area = 20;
  MserParams mser;
  double angle_step = kDefaultAngleStep;
  PairRule pair;
  double anchor_band = kAnchorBand;
};

/// Everything the pipeline produces for one block, kept for debugging dumps.
struct BlockTrace {
  TextBlock block;
  std::vector<Component> components;
  double orientation = 0.0;
  std::vector<LineCandidate> candidates;
};

std::vector<BlockTrace> generate_traced(const GrayImage& image, const ProbabilityMap& saliency,
                                        const CandidateParams& params);

std::vector<LineCandidate> generate_all(const GrayImage& image, const ProbabilityMap& saliency,
                                        const CandidateParams& params);

}  // namespace textdet
