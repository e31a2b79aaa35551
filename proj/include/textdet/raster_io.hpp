#pragma once

#include <filesystem>

#include "textdet/imaging.hpp"

namespace textdet {

/// Reads P5/P2 graymaps and P6/P3 pixmaps (converted with luma()). Throws
/// Error with kMissingFile, kMalformedRaster or kUnsupportedDepth.
GrayImage load_image(const std::filesystem::path& path);

/// Writes binary P5.
void save_image(const std::filesystem::path& path, const GrayImage& image);

/// Probability maps travel as P5 with value round(p * 255).
ProbabilityMap load_probability_map(const std::filesystem::path& path);
void save_probability_map(const std::filesystem::path& path, const ProbabilityMap& map);

GrayImage quantize(const ProbabilityMap& map);
ProbabilityMap dequantize(const GrayImage& image);

}  // namespace textdet
