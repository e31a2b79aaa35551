#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "textdet/errors.hpp"

namespace textdet {

struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// Inclusive pixel bounds.
struct BoxI {
  int x0 = 0;
  int y0 = 0;
  int x1 = -1;
  int y1 = -1;

  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
  long long area() const { return static_cast<long long>(width()) * height(); }
  bool empty() const { return x1 < x0 || y1 < y0; }
  bool contains(Pixel p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  void expand(Pixel p);

  friend bool operator==(const BoxI&, const BoxI&) = default;
};

// Row-major 2-D raster. The tag keeps gray images, masks and maps apart at
// the type level even when they share an element type.
template <typename T, typename Tag>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * height) {
      throw Error(ErrorCode::kDimensionMismatch, "raster data length does not match width x height");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  const std::vector<T>& values() const { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::kInvalidArgument, "raster dimensions must be >= 1");
    }
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct GrayTag;
struct MaskTag;
struct ProbabilityTag;

using GrayImage = Raster<std::uint8_t, GrayTag>;
/// Booleans stored as 0/1 bytes.
using BinaryMask = Raster<std::uint8_t, MaskTag>;
/// Values in [0, 1]; use make_probability_map to validate foreign data.
using ProbabilityMap = Raster<double, ProbabilityTag>;

ProbabilityMap make_probability_map(int width, int height, std::vector<double> data);

/// Pixels of one connected region, in row-major order.
struct PixelRegion {
  std::vector<Pixel> pixels;
  BoxI bbox;

  std::size_t area() const { return pixels.size(); }
};

enum class Connectivity { kFour = 4, kEight = 8 };

/// Regions ordered by their smallest row-major pixel index.
std::vector<PixelRegion> connected_components(const BinaryMask& mask, Connectivity connectivity);

BinaryMask threshold_above(const ProbabilityMap& map, double threshold);

/// Bilinear resampling with pixel-center alignment; resizing to the same
/// size is the identity.
GrayImage resize_bilinear(const GrayImage& image, int width, int height);
ProbabilityMap resize_bilinear(const ProbabilityMap& map, int width, int height);

GrayImage crop(const GrayImage& image, const BoxI& box);

/// Sample with bilinear interpolation, clamping coordinates to the border.
double sample_bilinear(const GrayImage& image, double x, double y);

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

}  // namespace textdet
