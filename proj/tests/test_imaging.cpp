#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "textdet/imaging.hpp"
#include "textdet/raster_io.hpp"

using namespace textdet;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "textdet_test_imaging";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double density) {
  BinaryMask m(w, h);
  std::bernoulli_distribution on(density);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = on(rng) ? 1 : 0;
  return m;
}

}  // namespace

TEST_CASE("raster construction validates dimensions") {
  CHECK_THROWS_AS(GrayImage(0, 3), Error);
  CHECK_THROWS_AS(GrayImage(2, 2, std::vector<std::uint8_t>{1, 2, 3}), Error);
  GrayImage img(3, 2, std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6});
  CHECK(img.at(2, 1) == 6);
  CHECK(img.at(0, 1) == 4);
  CHECK_THROWS_AS(make_probability_map(1, 2, {0.5, 1.5}), Error);
  CHECK_NOTHROW(make_probability_map(1, 2, {0.0, 1.0}));
}

TEST_CASE("connected components: fixed cases") {
  CHECK(connected_components(BinaryMask(4, 4), Connectivity::kEight).empty());

  BinaryMask m(3, 3);
  m.at(0, 0) = 1;
  m.at(2, 2) = 1;
  const auto four = connected_components(m, Connectivity::kFour);
  REQUIRE(four.size() == 2);
  CHECK(four[0].area() == 1);
  CHECK(four[1].area() == 1);

  m.at(1, 1) = 1;
  CHECK(connected_components(m, Connectivity::kFour).size() == 3);
  const auto eight = connected_components(m, Connectivity::kEight);
  REQUIRE(eight.size() == 1);
  CHECK(eight[0].area() == 3);
  CHECK(eight[0].bbox == BoxI{0, 0, 2, 2});
}

TEST_CASE("connected components match a relaxation oracle on random masks") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const BinaryMask mask = random_mask(rng, 16, 16, 0.2 + 0.5 * (trial % 5) / 4.0);
    for (bool eight : {false, true}) {
      const auto regions = connected_components(mask, eight ? Connectivity::kEight : Connectivity::kFour);
      const auto labels = oracle::relaxation_labels(mask, eight);
      // Same partition: every region holds exactly one oracle label, and
      // every oracle label belongs to exactly one region.
      std::set<int> seen_labels;
      std::size_t total = 0;
      int previous_first = -1;
      for (const PixelRegion& r : regions) {
        const int label = labels[mask.index(r.pixels.front().x, r.pixels.front().y)];
        CHECK(seen_labels.insert(label).second);
        for (const Pixel& p : r.pixels) CHECK(labels[mask.index(p.x, p.y)] == label);
        const int first = static_cast<int>(mask.index(r.pixels.front().x, r.pixels.front().y));
        CHECK(first > previous_first);
        previous_first = first;
        total += r.area();
      }
      std::size_t true_count = 0;
      std::set<int> oracle_labels;
      for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) {
          ++true_count;
          oracle_labels.insert(labels[i]);
        }
      }
      CHECK(total == true_count);
      CHECK(oracle_labels.size() == regions.size());
    }
  }
}

TEST_CASE("threshold is strict") {
  const ProbabilityMap m = make_probability_map(3, 1, {0.2, 0.2000001, 0.1});
  const BinaryMask b = threshold_above(m, 0.2);
  CHECK(b[0] == 0);
  CHECK(b[1] == 1);
  CHECK(b[2] == 0);
}

TEST_CASE("bilinear resize") {
  std::mt19937_64 rng(3);
  GrayImage img(7, 5);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<std::uint8_t>(rng() % 256);
  CHECK(resize_bilinear(img, 7, 5) == img);
  const GrayImage flat(9, 4, 77);
  const GrayImage big = resize_bilinear(flat, 31, 13);
  CHECK(std::all_of(big.data().begin(), big.data().end(), [](std::uint8_t v) { return v == 77; }));
  // Exact 2x downscale of a 2x2-block image reproduces the blocks.
  GrayImage blocks(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) blocks.at(x, y) = static_cast<std::uint8_t>(40 * (x / 2) + 100 * (y / 2));
  }
  const GrayImage half = resize_bilinear(blocks, 2, 2);
  CHECK(half.at(0, 0) == 0);
  CHECK(half.at(1, 0) == 40);
  CHECK(half.at(0, 1) == 100);
  CHECK(half.at(1, 1) == 140);
}

TEST_CASE("integer luma rounding") {
  CHECK(luma(255, 255, 255) == 255);
  CHECK(luma(0, 0, 0) == 0);
  // 0.299 * 100 = 29.9 -> 30
  CHECK(luma(100, 0, 0) == 30);
  CHECK(luma(0, 100, 0) == 59);
  CHECK(luma(0, 0, 100) == 11);
  CHECK(luma(10, 20, 30) == 18);
}

TEST_CASE("pgm loading") {
  const fs::path p = temp_path("tiny.pgm");
  write_bytes(p, std::string("P5\n2 2\n255\n") + std::string("\x00\xff\x80\x40", 4));
  const GrayImage img = load_image(p);
  CHECK(img.width() == 2);
  CHECK(img.height() == 2);
  CHECK(img.values() == std::vector<std::uint8_t>{0, 255, 128, 64});

  const fs::path comment = temp_path("comment.pgm");
  write_bytes(comment, std::string("P5\n# note\n2 1 # trailing\n255\n") + std::string("\x05\x06", 2));
  CHECK(load_image(comment).values() == std::vector<std::uint8_t>{5, 6});

  const fs::path ascii = temp_path("ascii.pgm");
  write_bytes(ascii, "P2\n3 1\n255\n1 2 250\n");
  CHECK(load_image(ascii).values() == std::vector<std::uint8_t>{1, 2, 250});

  const fs::path color = temp_path("color.ppm");
  write_bytes(color, std::string("P6\n1 1\n255\n") + std::string("\x64\x00\x00", 3));
  CHECK(load_image(color).at(0, 0) == 30);
}

TEST_CASE("pgm loading errors are distinct") {
  const fs::path truncated = temp_path("truncated.pgm");
  write_bytes(truncated, std::string("P5\n4 4\n255\n") + std::string("\x01\x02\x03", 3));
  try {
    load_image(truncated);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedRaster);
    CHECK(std::string(e.what()).find("malformed raster") != std::string::npos);
  }

  const fs::path deep = temp_path("deep.pgm");
  write_bytes(deep, "P5\n1 1\n65535\n\x01\x02");
  try {
    load_image(deep);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnsupportedDepth);
  }

  try {
    load_image(temp_path("does_not_exist.pgm"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingFile);
  }

  const fs::path junk = temp_path("junk.pgm");
  write_bytes(junk, "hello");
  CHECK_THROWS_AS(load_image(junk), Error);
}

TEST_CASE("save then load round-trips random images") {
  std::mt19937_64 rng(17);
  const fs::path p = temp_path("roundtrip.pgm");
  for (int trial = 0; trial < 100; ++trial) {
    GrayImage img(17, 9);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<std::uint8_t>(rng() & 0xFF);
    save_image(p, img);
    CHECK(load_image(p) == img);
  }
}

TEST_CASE("probability maps are quantized to round(p * 255)") {
  const ProbabilityMap m = make_probability_map(4, 1, {0.0, 0.5, 1.0, 0.2});
  const GrayImage q = quantize(m);
  CHECK(q.values() == std::vector<std::uint8_t>{0, 128, 255, 51});
  const fs::path p = temp_path("map.pgm");
  save_probability_map(p, m);
  const ProbabilityMap back = load_probability_map(p);
  CHECK(back.at(1, 0) == doctest::Approx(128.0 / 255.0));
  CHECK(back.at(3, 0) == doctest::Approx(0.2));
}
