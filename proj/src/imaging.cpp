#include "textdet/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "textdet/union_find.hpp"

namespace textdet {

void BoxI::expand(Pixel p) {
  if (empty()) {
    x0 = x1 = p.x;
    y0 = y1 = p.y;
    return;
  }
  x0 = std::min(x0, p.x);
  y0 = std::min(y0, p.y);
  x1 = std::max(x1, p.x);
  y1 = std::max(y1, p.y);
}

ProbabilityMap make_probability_map(int width, int height, std::vector<double> data) {
  for (double v : data) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "probability values must lie in [0, 1]");
    }
  }
  return ProbabilityMap(width, height, std::move(data));
}

std::vector<PixelRegion> connected_components(const BinaryMask& mask, Connectivity connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> labels(mask.size(), -1);
  UnionFind sets;

  // First pass: provisional labels from the already-visited neighbourhood.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.at(x, y)) continue;
      int label = -1;
      auto visit = [&](int nx, int ny) {
        if (!mask.in_bounds(nx, ny) || !mask.at(nx, ny)) return;
        const int other = labels[mask.index(nx, ny)];
        if (label < 0) {
          label = other;
        } else if (other != label) {
          sets.unite(label, other);
        }
      };
      visit(x - 1, y);
      visit(x, y - 1);
      if (connectivity == Connectivity::kEight) {
        visit(x - 1, y - 1);
        visit(x + 1, y - 1);
      }
      if (label < 0) label = sets.add();
      labels[mask.index(x, y)] = label;
    }
  }

  // Second pass: resolve equivalences; regions appear in order of first pixel.
  std::vector<int> region_of(sets.size(), -1);
  std::vector<PixelRegion> regions;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int label = labels[mask.index(x, y)];
      if (label < 0) continue;
      const int root = sets.find(label);
      if (region_of[root] < 0) {
        region_of[root] = static_cast<int>(regions.size());
        regions.emplace_back();
      }
      PixelRegion& region = regions[region_of[root]];
      region.pixels.push_back({x, y});
      region.bbox.expand({x, y});
    }
  }
  return regions;
}

BinaryMask threshold_above(const ProbabilityMap& map, double threshold) {
  BinaryMask mask(map.width(), map.height(), 0);
  for (std::size_t i = 0; i < map.size(); ++i) mask[i] = map[i] > threshold ? 1 : 0;
  return mask;
}

namespace {

template <typename Out, typename In, typename Convert>
Out resize_impl(const In& src, int width, int height, Convert convert) {
  Out dst(width, height);
  if (width == src.width() && height == src.height()) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
    return dst;
  }
  const double sx = static_cast<double>(src.width()) / width;
  const double sy = static_cast<double>(src.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, src.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, src.width() - 1);
      const double wx = fx - x0;
      const double top = src.at(x0, y0) * (1.0 - wx) + src.at(x1, y0) * wx;
      const double bottom = src.at(x0, y1) * (1.0 - wx) + src.at(x1, y1) * wx;
      dst.at(x, y) = convert(top * (1.0 - wy) + bottom * wy);
    }
  }
  return dst;
}

}  // namespace

GrayImage resize_bilinear(const GrayImage& image, int width, int height) {
  return resize_impl<GrayImage>(image, width, height, [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  });
}

ProbabilityMap resize_bilinear(const ProbabilityMap& map, int width, int height) {
  return resize_impl<ProbabilityMap>(map, width, height,
                                     [](double v) { return std::clamp(v, 0.0, 1.0); });
}

GrayImage crop(const GrayImage& image, const BoxI& box) {
  if (box.empty() || box.x0 < 0 || box.y0 < 0 || box.x1 >= image.width() || box.y1 >= image.height()) {
    throw Error(ErrorCode::kInvalidArgument, "crop box outside image");
  }
  GrayImage out(box.width(), box.height());
  for (int y = 0; y < box.height(); ++y) {
    for (int x = 0; x < box.width(); ++x) out.at(x, y) = image.at(box.x0 + x, box.y0 + y);
  }
  return out;
}

double sample_bilinear(const GrayImage& image, double x, double y) {
  const double fx = std::clamp(x, 0.0, image.width() - 1.0);
  const double fy = std::clamp(y, 0.0, image.height() - 1.0);
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const int x1 = std::min(x0 + 1, image.width() - 1);
  const int y1 = std::min(y0 + 1, image.height() - 1);
  const double wx = fx - x0;
  const double wy = fy - y0;
  const double top = image.at(x0, y0) * (1.0 - wx) + image.at(x1, y0) * wx;
  const double bottom = image.at(x0, y1) * (1.0 - wx) + image.at(x1, y1) * wx;
  return top * (1.0 - wy) + bottom * wy;
}

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  // round(0.299 R + 0.587 G + 0.114 B) in exact integer arithmetic.
  const int weighted = 299 * r + 587 * g + 114 * b;
  return static_cast<std::uint8_t>((weighted + 500) / 1000);
}

}  // namespace textdet
