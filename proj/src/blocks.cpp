#include "textdet/blocks.hpp"

namespace textdet {

bool TextBlock::contains(Pixel p) const {
  if (!bbox.contains(p)) return false;
  return mask[static_cast<std::size_t>(p.y - bbox.y0) * bbox.width() + (p.x - bbox.x0)] != 0;
}

TextBlock make_block(int id, PixelRegion region, int image_width, int image_height) {
  TextBlock block;
  block.id = id;
  block.bbox = region.bbox;
  block.mask.assign(static_cast<std::size_t>(block.bbox.area()), 0);
  for (const Pixel& p : region.pixels) {
    block.mask[static_cast<std::size_t>(p.y - block.bbox.y0) * block.bbox.width() + (p.x - block.bbox.x0)] = 1;
  }
  for (const Pixel& p : region.pixels) {
    const bool on_border = p.x == 0 || p.y == 0 || p.x == image_width - 1 || p.y == image_height - 1;
    const bool exposed = !block.contains({p.x - 1, p.y}) || !block.contains({p.x + 1, p.y}) ||
                         !block.contains({p.x, p.y - 1}) || !block.contains({p.x, p.y + 1});
    if (on_border || exposed) block.boundary.push_back(p);
  }
  block.region = std::move(region);
  return block;
}

std::vector<TextBlock> extract_blocks(const ProbabilityMap& saliency, double threshold, int min_area) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "block threshold must lie in (0, 1)");
  }
  std::vector<TextBlock> blocks;
  for (PixelRegion& region : connected_components(threshold_above(saliency, threshold), Connectivity::kEight)) {
    if (static_cast<int>(region.area()) < min_area) continue;
    const int id = static_cast<int>(blocks.size());
    blocks.push_back(make_block(id, std::move(region), saliency.width(), saliency.height()));
  }
  return blocks;
}

}  // namespace textdet
