#pragma once

#include <vector>

#include "textdet/imaging.hpp"

namespace textdet {

/// A connected region of the thresholded saliency map.
struct TextBlock {
  int id = 0;
  PixelRegion region;
  /// Region pixels with a non-region 4-neighbour or on the image border.
  std::vector<Pixel> boundary;
  BoxI bbox;
  /// Membership over bbox, row-major, 1 = region pixel.
  std::vector<std::uint8_t> mask;

  bool contains(Pixel p) const;
};

inline constexpr double kDefaultBlockThreshold = 0.2;
inline constexpr int kDefaultMinBlockArea = 20;

/// Binarise at strict > threshold, group 8-connected, drop regions smaller
/// than min_area. Blocks are ordered by smallest row-major pixel index.
std::vector<TextBlock> extract_blocks(const ProbabilityMap& saliency, double threshold = kDefaultBlockThreshold,
                                      int min_area = kDefaultMinBlockArea);

/// Builds a block (boundary, mask) from an arbitrary region of an image of
/// the given size.
TextBlock make_block(int id, PixelRegion region, int image_width, int image_height);

}  // namespace textdet
