#include "textdet/raster_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace textdet {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  // Reads one whitespace-delimited token, skipping '#' comments.
  std::string token() {
    for (;;) {
      while (pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
      if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    return bytes_.substr(start, pos_ - start);
  }

  long number() {
    const std::string t = token();
    if (t.empty() || t.size() > 9) throw Error(ErrorCode::kMalformedRaster, "malformed raster: bad header field");
    for (char c : t) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw Error(ErrorCode::kMalformedRaster, "malformed raster: bad header field '" + t + "'");
      }
    }
    return std::stol(t);
  }

  // Binary payload starts after exactly one whitespace byte.
  std::size_t binary_start() {
    if (pos_ >= bytes_.size()) throw Error(ErrorCode::kMalformedRaster, "malformed raster: missing body");
    return pos_ + 1;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "missing file: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  HeaderReader header(bytes);
  const std::string magic = header.token();
  if (magic != "P5" && magic != "P2" && magic != "P6" && magic != "P3") {
    throw Error(ErrorCode::kMalformedRaster, "malformed raster: unknown magic in " + path.string());
  }
  const long width = header.number();
  const long height = header.number();
  const long maxval = header.number();
  if (width < 1 || height < 1) throw Error(ErrorCode::kMalformedRaster, "malformed raster: empty image");
  if (maxval < 1) throw Error(ErrorCode::kMalformedRaster, "malformed raster: bad maxval");
  if (maxval > 255) {
    throw Error(ErrorCode::kUnsupportedDepth, "unsupported bit depth: maxval " + std::to_string(maxval));
  }

  const bool color = magic == "P6" || magic == "P3";
  const std::size_t channels = color ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> samples(count * channels);

  if (magic == "P5" || magic == "P6") {
    const std::size_t start = header.binary_start();
    if (bytes.size() < start + samples.size()) {
      throw Error(ErrorCode::kMalformedRaster, "malformed raster: truncated body in " + path.string());
    }
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = static_cast<std::uint8_t>(bytes[start + i]);
  } else {
    for (auto& s : samples) {
      const long v = header.number();
      if (v > maxval) throw Error(ErrorCode::kMalformedRaster, "malformed raster: sample exceeds maxval");
      s = static_cast<std::uint8_t>(v);
    }
  }
  for (auto s : samples) {
    if (s > maxval) throw Error(ErrorCode::kMalformedRaster, "malformed raster: sample exceeds maxval");
  }

  std::vector<std::uint8_t> gray(count);
  for (std::size_t i = 0; i < count; ++i) {
    gray[i] = color ? luma(samples[3 * i], samples[3 * i + 1], samples[3 * i + 2]) : samples[i];
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(gray));
}

void save_image(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data().data()), static_cast<std::streamsize>(image.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

GrayImage quantize(const ProbabilityMap& map) {
  GrayImage out(map.width(), map.height());
  for (std::size_t i = 0; i < map.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(map[i], 0.0, 1.0) * 255.0));
  }
  return out;
}

ProbabilityMap dequantize(const GrayImage& image) {
  ProbabilityMap out(image.width(), image.height());
  for (std::size_t i = 0; i < image.size(); ++i) out[i] = image[i] / 255.0;
  return out;
}

ProbabilityMap load_probability_map(const std::filesystem::path& path) { return dequantize(load_image(path)); }

void save_probability_map(const std::filesystem::path& path, const ProbabilityMap& map) {
  save_image(path, quantize(map));
}

}  // namespace textdet
