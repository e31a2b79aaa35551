#include "textdet/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "textdet/union_find.hpp"

namespace textdet {

double pair_orientation(const Component& a, const Component& b) {
  const Point d = b.centroid - a.centroid;
  return wrap_half_pi(std::atan2(d.y, d.x));
}

bool pair_compatible(const Component& a, const Component& b, double theta, const PairRule& rule) {
  const double ratio = static_cast<double>(a.height()) / b.height();
  if (!(ratio > 1.0 / rule.max_height_ratio && ratio < rule.max_height_ratio)) return false;
  return std::abs(orientation_difference(pair_orientation(a, b), theta)) < rule.max_angle_gap;
}

std::vector<LineGroup> group_components(std::span<const Component> components, double theta, int block_id,
                                        const PairRule& rule) {
  const int n = static_cast<int>(components.size());
  UnionFind sets(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (pair_compatible(components[i], components[j], theta, rule)) sets.unite(i, j);
    }
  }
  std::vector<int> group_of(n, -1);
  std::vector<LineGroup> groups;
  for (int i = 0; i < n; ++i) {
    const int root = sets.find(i);
    if (group_of[root] < 0) {
      group_of[root] = static_cast<int>(groups.size());
      groups.push_back({{}, {}, block_id});
    }
    groups[group_of[root]].members.push_back(i);
  }
  for (LineGroup& g : groups) {
    Point sum;
    for (int m : g.members) sum = sum + components[m].centroid;
    g.center = (1.0 / g.members.size()) * sum;
  }
  return groups;
}

std::vector<Point> anchor_points(const LineGroup& group, double theta, const TextBlock& block, double band) {
  const Point normal{-std::sin(theta), std::cos(theta)};
  std::vector<Point> anchors;
  for (const Pixel& p : block.boundary) {
    const Point q{static_cast<double>(p.x), static_cast<double>(p.y)};
    if (std::abs(dot(q - group.center, normal)) <= band) anchors.push_back(q);
  }
  if (!anchors.empty()) return anchors;

  // Fallback: clip the line against the pixel-corner extent of the bbox.
  const Point dir{std::cos(theta), std::sin(theta)};
  const double x0 = block.bbox.x0 - 0.5, x1 = block.bbox.x1 + 0.5;
  const double y0 = block.bbox.y0 - 0.5, y1 = block.bbox.y1 + 0.5;
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  auto clip = [&](double origin, double step, double lo, double hi) {
    if (std::abs(step) < 1e-12) {
      if (origin < lo || origin > hi) t_lo = std::numeric_limits<double>::infinity();
      return;
    }
    double a = (lo - origin) / step;
    double b = (hi - origin) / step;
    if (a > b) std::swap(a, b);
    t_lo = std::max(t_lo, a);
    t_hi = std::min(t_hi, b);
  };
  clip(group.center.x, dir.x, x0, x1);
  clip(group.center.y, dir.y, y0, y1);
  if (t_lo <= t_hi) {
    anchors.push_back(group.center + t_lo * dir);
    anchors.push_back(group.center + t_hi * dir);
  }
  return anchors;
}

LineCandidate make_candidate(const LineGroup& group, std::span<const Component> components,
                             std::span<const Point> anchors, double orientation) {
  if (group.members.empty()) throw Error(ErrorCode::kEmptyInput, "empty line group");
  std::vector<Point> points(anchors.begin(), anchors.end());
  for (int m : group.members) {
    for (const Pixel& p : components[m].region.pixels) {
      points.push_back({p.x - 0.5, p.y - 0.5});
      points.push_back({p.x + 0.5, p.y - 0.5});
      points.push_back({p.x + 0.5, p.y + 0.5});
      points.push_back({p.x - 0.5, p.y + 0.5});
    }
  }
  LineCandidate candidate;
  candidate.box = min_area_oriented_rect(points);
  candidate.group = group;
  candidate.anchors.assign(anchors.begin(), anchors.end());
  candidate.orientation = orientation;
  return candidate;
}

std::vector<BlockTrace> generate_traced(const GrayImage& image, const ProbabilityMap& saliency,
                                        const CandidateParams& params) {
  if (image.width() != saliency.width() || image.height() != saliency.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "image and saliency map dimensions differ");
  }
  std::vector<BlockTrace> traces;
  for (TextBlock& block : extract_blocks(saliency, params.block_threshold, params.min_block_area)) {
    BlockTrace trace;
    trace.components = extract_components(image, block, params.mser);
    if (!trace.components.empty()) {
      trace.orientation = estimate_orientation(build_profile(trace.components, block, params.angle_step));
      for (const LineGroup& group : group_components(trace.components, trace.orientation, block.id, params.pair)) {
        const auto anchors = anchor_points(group, trace.orientation, block, params.anchor_band);
        trace.candidates.push_back(make_candidate(group, trace.components, anchors, trace.orientation));
      }
    }
    trace.block = std::move(block);
    traces.push_back(std::move(trace));
  }
  return traces;
}

std::vector<LineCandidate> generate_all(const GrayImage& image, const ProbabilityMap& saliency,
                                        const CandidateParams& params) {
  std::vector<LineCandidate> all;
  for (BlockTrace& t : generate_traced(image, saliency, params)) {
    for (LineCandidate& c : t.candidates) all.push_back(std::move(c));
  }
  return all;
}

}  // namespace textdet
