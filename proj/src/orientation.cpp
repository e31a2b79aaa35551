#include "textdet/orientation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace textdet {

int ProjectionProfile::peak(std::size_t angle_index) const {
  const auto begin = counts.begin() + static_cast<std::ptrdiff_t>(angle_index * offsets_per_angle);
  return *std::max_element(begin, begin + offsets_per_angle);
}

Point block_center(const TextBlock& block) {
  return {(block.bbox.x0 + block.bbox.x1) / 2.0, (block.bbox.y0 + block.bbox.y1) / 2.0};
}

std::vector<double> angle_grid(double angle_step) {
  if (!(angle_step > 0.0) || angle_step > std::numbers::pi) {
    throw Error(ErrorCode::kInvalidArgument, "angle_step must lie in (0, pi]");
  }
  const int n = std::max(1, static_cast<int>(std::lround(std::numbers::pi / angle_step)));
  std::vector<double> angles(n);
  for (int k = 0; k < n; ++k) angles[k] = (k - n / 2.0) * (std::numbers::pi / n);
  return angles;
}

std::array<Point, 4> box_corners(const BoxI& box) {
  const double x0 = box.x0 - 0.5, y0 = box.y0 - 0.5, x1 = box.x1 + 0.5, y1 = box.y1 + 0.5;
  return {Point{x0, y0}, Point{x1, y0}, Point{x1, y1}, Point{x0, y1}};
}

ProjectionProfile build_profile(std::span<const Component> components, const TextBlock& block, double angle_step) {
  if (components.empty()) throw Error(ErrorCode::kEmptyInput, "empty component list");
  ProjectionProfile profile;
  profile.angles = angle_grid(angle_step);
  const Point c = block_center(block);
  const double reach = std::ceil(std::hypot(block.bbox.width(), block.bbox.height()) / 2.0);
  profile.min_offset = -static_cast<int>(reach);
  profile.offsets_per_angle = 2 * static_cast<int>(reach) + 1;
  profile.counts.assign(profile.angles.size() * profile.offsets_per_angle, 0);

  for (std::size_t t = 0; t < profile.angles.size(); ++t) {
    const double theta = profile.angles[t];
    const Point normal{-std::sin(theta), std::cos(theta)};
    int* row = profile.counts.data() + t * profile.offsets_per_angle;
    for (const Component& comp : components) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const Point& p : box_corners(comp.region.bbox)) {
        const double h = dot(p - c, normal);
        lo = std::min(lo, h);
        hi = std::max(hi, h);
      }
      const int first = std::max(profile.min_offset, static_cast<int>(std::ceil(lo)));
      const int last = std::min(profile.min_offset + profile.offsets_per_angle - 1, static_cast<int>(std::floor(hi)));
      for (int h = first; h <= last; ++h) ++row[h - profile.min_offset];
    }
  }
  return profile;
}

double estimate_orientation(const ProjectionProfile& profile) {
  if (profile.angles.empty() || profile.offsets_per_angle == 0) {
    throw Error(ErrorCode::kEmptyInput, "empty projection profile");
  }
  const std::size_t n = profile.angles.size();
  std::vector<int> peaks(n);
  for (std::size_t t = 0; t < n; ++t) peaks[t] = profile.peak(t);
  const int top = *std::max_element(peaks.begin(), peaks.end());
  auto better = [](double a, double b) { return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a < b); };
  auto pick = [&](const std::vector<double>& choices) {
    double best = choices.front();
    for (double c : choices) {
      if (better(c, best)) best = c;
    }
    return best;
  };
  if (std::all_of(peaks.begin(), peaks.end(), [&](int p) { return p == top; })) return pick(profile.angles);

  // Among maximal angles, prefer those where the most offsets reach the peak.
  std::vector<int> width(n, -1);
  for (std::size_t t = 0; t < n; ++t) {
    if (peaks[t] != top) continue;
    width[t] = 0;
    for (int h = 0; h < profile.offsets_per_angle; ++h) {
      width[t] += profile.counts[t * profile.offsets_per_angle + h] == top ? 1 : 0;
    }
  }
  const int widest = *std::max_element(width.begin(), width.end());

  // Each circular run of selected angles contributes its middle element;
  // even runs offer both middle elements.
  std::vector<double> choices;
  for (std::size_t t = 0; t < n; ++t) {
    if (width[t] != widest || width[(t + n - 1) % n] == widest) continue;
    std::size_t len = 0;
    while (width[(t + len) % n] == widest) ++len;
    choices.push_back(profile.angles[(t + (len - 1) / 2) % n]);
    if (len % 2 == 0) choices.push_back(profile.angles[(t + len / 2) % n]);
  }
  return pick(choices);
}

}  // namespace textdet
