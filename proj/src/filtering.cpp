#include "textdet/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace textdet {

void FilterParams::validate() const {
  if (min_centroids < 1) throw Error(ErrorCode::kInvalidArgument, "min_centroids must be >= 1");
  if (!(min_avg_score > 0.0 && min_avg_score <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "min_avg_score must lie in (0, 1]");
  }
  if (!(max_mu > 0.0) || !(max_sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "angle gates must be positive");
  if (!(nms_overlap > 0.0 && nms_overlap < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "nms_overlap must lie in (0, 1)");
  }
  if (!(peak_floor > 0.0 && peak_floor <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "peak_floor must lie in (0, 1]");
  if (!(peak_radius_fraction > 0.0)) throw Error(ErrorCode::kInvalidArgument, "peak_radius_fraction must be positive");
  if (normalized_height < 1 || min_normalized_width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "normalized sizes must be positive");
  }
  if (!(word_gap_factor > 0.0) || !(word_min_gap >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "word gap settings must be positive");
  }
}

double CentroidSet::score_sum() const {
  double s = 0.0;
  for (const ScoredPoint& p : points) s += p.score;
  return s;
}

int normalized_width(const OrientedRect& box, const FilterParams& params) {
  if (!(box.length > 0.0 && box.thickness > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "candidate box has zero area");
  }
  const double w = std::round(params.normalized_height * box.length / box.thickness);
  return std::max(params.min_normalized_width, static_cast<int>(std::min(w, 1e6)));
}

Point normalized_to_image(const OrientedRect& box, int frame_width, int frame_height, Point p) {
  const double u = (p.x + 0.5) * box.length / frame_width - box.length / 2;
  const double v = (p.y + 0.5) * box.thickness / frame_height - box.thickness / 2;
  return box.from_local({u, v});
}

Point image_to_normalized(const OrientedRect& box, int frame_width, int frame_height, Point p) {
  const Point uv = box.to_local(p);
  return {(uv.x + box.length / 2) * frame_width / box.length - 0.5,
          (uv.y + box.thickness / 2) * frame_height / box.thickness - 0.5};
}

GrayImage normalize_candidate(const GrayImage& image, const OrientedRect& box, const FilterParams& params) {
  const int w = normalized_width(box, params);
  const int h = params.normalized_height;
  GrayImage out(w, h);
  for (int j = 0; j < h; ++j) {
    for (int i = 0; i < w; ++i) {
      const Point p = normalized_to_image(box, w, h, {static_cast<double>(i), static_cast<double>(j)});
      const double v = sample_bilinear(image, p.x, p.y);
      out.at(i, j) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

CentroidSet extract_centroids(const ProbabilityMap& map, const FilterParams& params) {
  CentroidSet out;
  out.frame_width = map.width();
  out.frame_height = map.height();
  const int r = std::max(1, static_cast<int>(std::lround(params.peak_radius_fraction * map.height())));
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const double v = map.at(x, y);
      if (v < params.peak_floor) continue;
      bool dominant = true;
      for (int dy = -r; dy <= r && dominant; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          if ((dx == 0 && dy == 0) || !map.in_bounds(x + dx, y + dy)) continue;
          const double q = map.at(x + dx, y + dy);
          // Equal neighbours earlier in row-major order win the plateau.
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (q > v || (q == v && earlier)) {
            dominant = false;
            break;
          }
        }
      }
      if (dominant) out.points.push_back({{static_cast<double>(x), static_cast<double>(y)}, v});
    }
  }
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const ScoredPoint& a, const ScoredPoint& b) { return a.position.x < b.position.x; });
  return out;
}

bool intensity_criterion(const CentroidSet& centroids, const FilterParams& params) {
  if (centroids.count() < params.min_centroids || centroids.count() == 0) return false;
  return centroids.score_sum() / centroids.count() >= params.min_avg_score;
}

AngleStats centroid_angle_stats(const CentroidSet& centroids) {
  const auto& pts = centroids.points;
  if (pts.size() < 2) throw Error(ErrorCode::kInvalidArgument, "criterion undefined: fewer than 2 centroids");
  std::vector<double> angles;
  angles.reserve(pts.size() * (pts.size() - 1) / 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Point d = pts[j].position - pts[i].position;
      angles.push_back(std::abs(wrap_half_pi(std::atan2(d.y, d.x))));
    }
  }
  const double n = static_cast<double>(angles.size());
  const double mu = std::accumulate(angles.begin(), angles.end(), 0.0) / n;
  double var = 0.0;
  for (double a : angles) var += (a - mu) * (a - mu);
  return {mu, std::sqrt(var / n)};
}

bool geometric_criterion(const CentroidSet& centroids, const FilterParams& params) {
  const AngleStats s = centroid_angle_stats(centroids);
  return s.mu < params.max_mu && s.sigma < params.max_sigma;
}

std::vector<Detection> nms(std::vector<Detection> detections, double overlap) {
  if (!(overlap > 0.0 && overlap < 1.0)) throw Error(ErrorCode::kInvalidArgument, "nms overlap must lie in (0, 1)");
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return detections[a].score > detections[b].score; });
  std::vector<Detection> kept;
  for (std::size_t i : order) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return rect_iou(k.box, detections[i].box) > overlap;
    });
    if (!suppressed) kept.push_back(std::move(detections[i]));
  }
  return kept;
}

std::vector<OrientedRect> word_partition(const Detection& detection, const CentroidSet& centroids,
                                         const FilterParams& params) {
  const OrientedRect& box = detection.box;
  if (centroids.points.size() < 2 || centroids.frame_width < 1) return {box};

  std::vector<double> xs;
  for (const ScoredPoint& p : centroids.points) xs.push_back(p.position.x);
  std::sort(xs.begin(), xs.end());
  std::vector<double> gaps;
  for (std::size_t i = 1; i < xs.size(); ++i) gaps.push_back(xs[i] - xs[i - 1]);
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

  // Runs as [first, last] index pairs into xs.
  std::vector<std::pair<std::size_t, std::size_t>> runs{{0, 0}};
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] > params.word_gap_factor * median && gaps[i] > params.word_min_gap) {
      runs.back().second = i;
      runs.push_back({i + 1, i + 1});
    }
  }
  runs.back().second = xs.size() - 1;
  if (runs.size() == 1) return {box};

  const double frame_w = centroids.frame_width;
  const double scale = box.length / frame_w;
  std::vector<OrientedRect> words;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    // Continuous frame coordinates: pixel i spans [i, i + 1].
    double lo = xs[runs[r].first] + 0.5 - median / 2;
    double hi = xs[runs[r].second] + 0.5 + median / 2;
    if (r == 0) lo = 0.0;
    if (r + 1 == runs.size()) hi = frame_w;
    lo = std::clamp(lo, 0.0, frame_w);
    hi = std::clamp(hi, 0.0, frame_w);
    const double u0 = lo * scale - box.length / 2;
    const double u1 = hi * scale - box.length / 2;
    const Point center = box.from_local({0.5 * (u0 + u1), 0.0});
    words.push_back(OrientedRect::make(center, u1 - u0, box.thickness, box.angle));
  }
  return words;
}

CentroidMapper net_mapper(const PixelNet& net) {
  return [&net](const GrayImage& normalized, const LineCandidate&) { return forward_padded(net, normalized); };
}

CentroidMapper oracle_mapper(std::vector<CharacterMark> chars) {
  return [chars = std::move(chars)](const GrayImage& normalized, const LineCandidate& candidate) {
    const OrientedRect& box = candidate.box;
    const int w = normalized.width();
    const int h = normalized.height();
    std::vector<CharacterMark> inside;
    for (const CharacterMark& c : chars) {
      if (!box.contains(c.centroid)) continue;
      inside.push_back({image_to_normalized(box, w, h, c.centroid), c.height * h / box.thickness});
    }
    return make_centroid_gt(w, h, inside).map();
  };
}

std::vector<Detection> filter_pipeline(const GrayImage& image, std::span<const LineCandidate> candidates,
                                       const CentroidMapper& mapper, const FilterParams& params,
                                       std::vector<CandidateVerdict>* verdicts) {
  params.validate();
  std::vector<Detection> scored;
  if (verdicts) verdicts->clear();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const LineCandidate& cand = candidates[c];
    CandidateVerdict verdict;
    if (cand.box.length > 0.0 && cand.box.thickness > 0.0) {
      const GrayImage patch = normalize_candidate(image, cand.box, params);
      const ProbabilityMap map = mapper(patch, cand);
      if (map.width() != patch.width() || map.height() != patch.height()) {
        throw Error(ErrorCode::kDimensionMismatch, "centroid map size differs from normalized candidate");
      }
      verdict.centroids = extract_centroids(map, params);
      verdict.intensity = intensity_criterion(verdict.centroids, params);
      verdict.geometric =
          verdict.intensity && verdict.centroids.count() >= 2 && geometric_criterion(verdict.centroids, params);
      if (verdict.intensity && verdict.geometric) {
        Detection d;
        d.box = cand.box;
        d.score = verdict.centroids.score_sum();
        d.centroids = verdict.centroids;
        d.candidate = static_cast<int>(c);
        scored.push_back(std::move(d));
      }
    }
    if (verdicts) verdicts->push_back(std::move(verdict));
  }
  std::vector<Detection> kept = nms(std::move(scored), params.nms_overlap);
  if (params.words) {
    for (Detection& d : kept) d.words = word_partition(d, d.centroids, params);
  }
  return kept;
}

}  // namespace textdet
