#include "textdet/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace textdet {

ProbabilityMap compute_saliency(const PixelNet& net, const GrayImage& image, std::span<const int> scales) {
  if (scales.empty()) return forward_padded(net, image);
  return multi_scale_saliency(net, image, scales);
}

PipelineResult run_pipeline(const GrayImage& image, const ProbabilityMap& saliency, const CentroidMapper* mapper,
                            const RunConfig& config) {
  config.validate();
  PipelineResult result;
  result.traces = generate_traced(image, saliency, config.candidates);
  for (const BlockTrace& t : result.traces) {
    result.candidates.insert(result.candidates.end(), t.candidates.begin(), t.candidates.end());
  }
  if (mapper) {
    result.detections = filter_pipeline(image, result.candidates, *mapper, config.filter, &result.verdicts);
    return result;
  }
  std::vector<Detection> all;
  for (std::size_t i = 0; i < result.candidates.size(); ++i) {
    const LineCandidate& c = result.candidates[i];
    if (!(c.box.area() > 0.0)) continue;
    Detection d;
    d.box = c.box;
    d.score = static_cast<double>(c.group.members.size());
    d.candidate = static_cast<int>(i);
    all.push_back(std::move(d));
  }
  result.detections = nms(std::move(all), config.filter.nms_overlap);
  if (config.filter.words) {
    for (Detection& d : result.detections) d.words = {d.box};
  }
  return result;
}

CentroidMapper image_map_mapper(ProbabilityMap centroid_map) {
  return [map = std::move(centroid_map)](const GrayImage& normalized, const LineCandidate& candidate) {
    const int w = normalized.width();
    const int h = normalized.height();
    ProbabilityMap out(w, h);
    for (int j = 0; j < h; ++j) {
      for (int i = 0; i < w; ++i) {
        const Point p = normalized_to_image(candidate.box, w, h, {static_cast<double>(i), static_cast<double>(j)});
        const double x = std::clamp(p.x, 0.0, map.width() - 1.0);
        const double y = std::clamp(p.y, 0.0, map.height() - 1.0);
        const int x0 = std::min(static_cast<int>(x), map.width() - 1);
        const int y0 = std::min(static_cast<int>(y), map.height() - 1);
        const int x1 = std::min(x0 + 1, map.width() - 1);
        const int y1 = std::min(y0 + 1, map.height() - 1);
        const double fx = x - x0;
        const double fy = y - y0;
        const double top = map.at(x0, y0) * (1 - fx) + map.at(x1, y0) * fx;
        const double bottom = map.at(x0, y1) * (1 - fx) + map.at(x1, y1) * fx;
        out.at(i, j) = std::clamp(top * (1 - fy) + bottom * fy, 0.0, 1.0);
      }
    }
    return out;
  };
}

GrayImage render_overlay(const GrayImage& image, std::span<const OrientedRect> boxes) {
  GrayImage out = image;
  for (const OrientedRect& box : boxes) {
    const auto corners = box.corners();
    for (std::size_t k = 0; k < 4; ++k) {
      const Point a = corners[k];
      const Point b = corners[(k + 1) % 4];
      const int steps = std::max(1, static_cast<int>(std::ceil(2 * distance(a, b))));
      for (int s = 0; s <= steps; ++s) {
        const Point p = a + (static_cast<double>(s) / steps) * (b - a);
        const int x = static_cast<int>(std::lround(p.x));
        const int y = static_cast<int>(std::lround(p.y));
        if (out.in_bounds(x, y)) out.at(x, y) = 255;
      }
    }
  }
  return out;
}

}  // namespace textdet
