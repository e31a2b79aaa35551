#include "textdet/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "textdet/errors.hpp"

namespace textdet {

namespace {

template <typename Overlap>
ImageMatches greedy_match(std::span<const ScoredBox> detections, std::span<const GroundTruthEntry> truths,
                          Overlap&& overlap) {
  ImageMatches out;
  out.detections = static_cast<int>(detections.size());
  for (const GroundTruthEntry& t : truths) (t.difficult ? out.difficult_truths : out.truths) += 1;

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return detections[a].score > detections[b].score; });
  std::vector<std::uint8_t> taken(truths.size(), 0);
  for (std::size_t d : order) {
    int best = -1;
    double best_value = 0.0;
    for (std::size_t t = 0; t < truths.size(); ++t) {
      if (taken[t]) continue;
      const double v = overlap(detections[d].box, truths[t].box);
      if (v > best_value) {
        best = static_cast<int>(t);
        best_value = v;
      }
    }
    if (best < 0) continue;
    taken[best] = 1;
    if (truths[best].difficult) {
      ++out.ignored_detections;
    } else {
      out.pairs.push_back({static_cast<int>(d), best});
    }
  }
  return out;
}

}  // namespace

ImageMatches match_rotated(std::span<const ScoredBox> detections, std::span<const GroundTruthEntry> truths,
                           const RotatedProtocol& protocol) {
  return greedy_match(detections, truths, [&](const OrientedRect& d, const OrientedRect& t) {
    if (std::abs(orientation_difference(d.angle, t.angle)) >= protocol.max_angle_diff) return 0.0;
    const double iou = rect_iou(d, t);
    return iou > protocol.min_overlap ? iou : 0.0;
  });
}

ImageMatches match_axis_aligned(std::span<const ScoredBox> detections, std::span<const GroundTruthEntry> truths,
                                const AxisProtocol& protocol) {
  return greedy_match(detections, truths, [&](const OrientedRect& d, const OrientedRect& t) {
    const double iou = axis_iou(axis_hull(d), axis_hull(t));
    return iou > protocol.min_iou ? iou : 0.0;
  });
}

Metrics metrics_from_counts(long long matches, long long detections, long long truths) {
  Metrics m;
  m.precision = detections > 0 ? static_cast<double>(matches) / detections : 0.0;
  m.recall = truths > 0 ? static_cast<double>(matches) / truths : 0.0;
  const double sum = m.precision + m.recall;
  m.f_measure = sum > 0.0 ? 2.0 * m.precision * m.recall / sum : 0.0;
  return m;
}

EvalReport report(std::span<const ImageMatches> images) {
  EvalReport r;
  for (const ImageMatches& im : images) {
    const long long dets = im.detections - im.ignored_detections;
    r.matches += static_cast<long long>(im.pairs.size());
    r.detections += dets;
    r.truths += im.truths;
    r.per_image.push_back(metrics_from_counts(static_cast<long long>(im.pairs.size()), dets, im.truths));
    r.images.push_back(im);
  }
  r.global = metrics_from_counts(r.matches, r.detections, r.truths);
  return r;
}

std::vector<GroundTruthEntry> parse_ground_truth(const std::string& text, const std::string& source) {
  std::vector<GroundTruthEntry> out;
  std::istringstream lines(text);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double xc = 0, yc = 0, length = 0, thickness = 0, angle = 0;
    if (!(fields >> xc >> yc >> length >> thickness >> angle)) {
      throw Error(ErrorCode::kInvalidArgument, source + ":" + std::to_string(number) + ": malformed ground-truth line");
    }
    int difficult = 0;
    if (!(fields >> difficult)) difficult = 0;
    GroundTruthEntry e;
    e.box = OrientedRect::make({xc, yc}, length, thickness, angle);
    e.difficult = difficult != 0;
    out.push_back(e);
  }
  return out;
}

std::vector<GroundTruthEntry> load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "missing file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_ground_truth(buffer.str(), path.string());
}

std::string format_ground_truth(std::span<const GroundTruthEntry> entries) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const GroundTruthEntry& e : entries) {
    out << e.box.center.x << ' ' << e.box.center.y << ' ' << e.box.length << ' ' << e.box.thickness << ' '
        << e.box.angle << ' ' << (e.difficult ? 1 : 0) << '\n';
  }
  return out.str();
}

void save_ground_truth(const std::filesystem::path& path, std::span<const GroundTruthEntry> entries) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << format_ground_truth(entries);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace textdet
