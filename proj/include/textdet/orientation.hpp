#pragma once

#include <array>
#include <numbers>
#include <span>
#include <vector>

#include "textdet/blocks.hpp"
#include "textdet/mser.hpp"

namespace textdet {

inline constexpr double kDefaultAngleStep = std::numbers::pi / 180.0;

/// counts[t * offsets_per_angle + (h - min_offset)] = number of component
/// bounding boxes crossed by the line of direction angles[t] at signed
/// perpendicular offset h from the block bbox center.
struct ProjectionProfile {
  std::vector<double> angles;
  int offsets_per_angle = 0;
  int min_offset = 0;
  std::vector<int> counts;

  int count(std::size_t angle_index, int offset) const {
    return counts[angle_index * offsets_per_angle + static_cast<std::size_t>(offset - min_offset)];
  }
  int peak(std::size_t angle_index) const;
};

/// Block bbox center in pixel-center coordinates.
Point block_center(const TextBlock& block);

/// Angle grid over [-pi/2, pi/2). The step is rounded so that it divides pi
/// exactly, which puts 0 on the grid whenever pi / step rounds to even.
std::vector<double> angle_grid(double angle_step);

/// Pixel-corner extent of an inclusive box, as a closed rectangle.
std::array<Point, 4> box_corners(const BoxI& box);

ProjectionProfile build_profile(std::span<const Component> components, const TextBlock& block,
                                double angle_step = kDefaultAngleStep);

/// argmax over angles of max over offsets. When the whole grid ties the
/// result is 0. Otherwise the maximal angles with the most offsets at the
/// peak are kept, each contiguous run of them is represented by its middle
/// grid angle, and the smallest |angle| wins, then the smallest angle.
double estimate_orientation(const ProjectionProfile& profile);

}  // namespace textdet
