#pragma once

#include <vector>

#include "textdet/blocks.hpp"
#include "textdet/geometry.hpp"
#include "textdet/imaging.hpp"

namespace textdet {

enum class Polarity { kDarkOnLight, kLightOnDark };

enum class AreaDenominator { kBlockBox, kImage };

struct MserParams {
  int delta = 5;
  double t1_min_area_ratio = 0.005;
  double t2_max_aspect = 3.0;
  double max_area_ratio = 0.25;
  double min_inside_fraction = 0.5;
  /// Regions less stable than this are never emitted.
  double max_variation = 0.25;
  AreaDenominator denominator = AreaDenominator::kBlockBox;

  void validate() const;
};

/// A character candidate.
struct Component {
  PixelRegion region;  // image coordinates
  Point centroid;
  Polarity polarity = Polarity::kDarkOnLight;
  int level = 0;          // threshold in polarity space where the region is taken
  double stability = 0.0; // best (|R(g+d)| - |R(g-d)|) / |R| over the region's levels

  int height() const { return region.bbox.height(); }
  int width() const { return region.bbox.width(); }
  std::size_t area() const { return region.area(); }
};

// Extremal regions of polarity P are the 4-connected components of
// {I <= g} (dark) or {255 - I <= g} (light) inside the block bbox. A region
// that keeps the same pixel set over levels [b, d) is one tree node; its
// stability is the minimum over those levels of
//   (|R(g + delta)| - |largest component of {<= g - delta} inside R|) / |R|,
// where R(g + delta) is the component containing R at that level. A node is
// maximally stable when its stability is <= that of its parent and of each
// child. Survivors of the area / aspect / inside-block filters are
// deduplicated along each branch: in order of (stability, -area, first
// pixel) a region is kept only if no kept region contains it or lies in it.
std::vector<Component> extract_components(const GrayImage& image, const TextBlock& block, const MserParams& params);

/// Filter predicate applied to every maximally stable region.
bool passes_component_filters(const PixelRegion& region, const TextBlock& block, const MserParams& params,
                              long long image_area);

}  // namespace textdet
