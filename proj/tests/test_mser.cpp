#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "textdet/mser.hpp"

using namespace textdet;

namespace {

TextBlock whole_image_block(int w, int h) {
  PixelRegion region;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      region.pixels.push_back({x, y});
      region.bbox.expand({x, y});
    }
  }
  return make_block(0, region, w, h);
}

std::vector<oracle::OracleComponent> as_oracle(const std::vector<Component>& comps) {
  std::vector<oracle::OracleComponent> out;
  for (const Component& c : comps) {
    std::vector<Pixel> px = c.region.pixels;
    std::sort(px.begin(), px.end(), oracle::pixel_less);
    out.push_back({c.polarity, px, c.level, c.stability});
  }
  return out;
}

void compare(const std::vector<oracle::OracleComponent>& got, const std::vector<oracle::OracleComponent>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].polarity == want[i].polarity);
    CHECK(got[i].pixels == want[i].pixels);
    CHECK(got[i].level == want[i].level);
    CHECK(got[i].stability == doctest::Approx(want[i].stability).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("parameter validation") {
  MserParams p;
  CHECK_NOTHROW(p.validate());
  p.delta = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.t1_min_area_ratio = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.t2_max_aspect = 1;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.max_variation = 0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("a dark square on a light field is one dark component") {
  GrayImage img(20, 20, 200);
  for (int y = 6; y <= 11; ++y) {
    for (int x = 5; x <= 10; ++x) img.at(x, y) = 40;
  }
  const TextBlock block = whole_image_block(20, 20);
  MserParams params;
  const auto comps = extract_components(img, block, params);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].polarity == Polarity::kDarkOnLight);
  CHECK(comps[0].area() == 36);
  CHECK(comps[0].level == 40);
  CHECK(comps[0].stability == 0.0);
  CHECK(comps[0].centroid.x == doctest::Approx(7.5));
  CHECK(comps[0].centroid.y == doctest::Approx(8.5));
  CHECK(comps[0].region.bbox == BoxI{5, 6, 10, 11});
}

TEST_CASE("inverting the image swaps polarity") {
  GrayImage img(20, 20, 200);
  for (int y = 6; y <= 11; ++y) {
    for (int x = 5; x <= 10; ++x) img.at(x, y) = 40;
  }
  GrayImage inv(20, 20);
  for (std::size_t i = 0; i < img.size(); ++i) inv[i] = 255 - img[i];
  const TextBlock block = whole_image_block(20, 20);
  const auto a = extract_components(img, block, {});
  const auto b = extract_components(inv, block, {});
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].polarity != b[i].polarity);
    CHECK(a[i].region.pixels == b[i].region.pixels);
  }
}

TEST_CASE("filters drop elongated, tiny and outside regions") {
  const TextBlock block = whole_image_block(40, 40);
  MserParams params;
  GrayImage img(40, 40, 220);
  for (int x = 2; x <= 30; ++x) img.at(x, 3) = img.at(x, 4) = 20;  // aspect 14.5
  img.at(35, 35) = 20;                                               // 1 pixel
  for (int y = 20; y <= 27; ++y) {
    for (int x = 10; x <= 15; ++x) img.at(x, y) = 20;
  }
  const auto comps = extract_components(img, block, params);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].region.bbox == BoxI{10, 20, 15, 27});

  PixelRegion strip;
  for (int x = 0; x < 9; ++x) {
    strip.pixels.push_back({x, 0});
    strip.bbox.expand({x, 0});
  }
  CHECK_FALSE(passes_component_filters(strip, block, params, 1600));
  params.t2_max_aspect = 10;
  CHECK(passes_component_filters(strip, block, params, 1600));
  params.denominator = AreaDenominator::kImage;
  CHECK(passes_component_filters(strip, block, params, 1600));
  CHECK_FALSE(passes_component_filters(strip, block, params, 100000));

  PixelRegion half;
  for (int x = 0; x < 4; ++x) {
    half.pixels.push_back({x, 0});
    half.bbox.expand({x, 0});
  }
  PixelRegion small_block_region;
  small_block_region.pixels = {{0, 0}, {1, 0}};
  small_block_region.bbox = BoxI{0, 0, 1, 0};
  const TextBlock tiny = make_block(0, small_block_region, 40, 40);
  MserParams loose;
  loose.t2_max_aspect = 10;
  loose.max_area_ratio = 1.0;
  loose.t1_min_area_ratio = 1e-4;
  loose.denominator = AreaDenominator::kImage;
  CHECK(passes_component_filters(half, tiny, loose, 1600));  // 2 of 4 inside
  loose.min_inside_fraction = 0.6;
  CHECK_FALSE(passes_component_filters(half, tiny, loose, 1600));
}

TEST_CASE("block outside the image is rejected") {
  PixelRegion region;
  region.pixels = {{30, 30}};
  region.bbox = BoxI{30, 30, 30, 30};
  const TextBlock block = make_block(0, region, 40, 40);
  CHECK_THROWS_AS(extract_components(GrayImage(10, 10), block, {}), Error);
}

TEST_CASE("component tree matches exhaustive thresholding") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 80; ++trial) {
    const int w = 3 + static_cast<int>(rng() % 12);
    const int h = 3 + static_cast<int>(rng() % 12);
    const int levels = 2 + static_cast<int>(rng() % 7);
    GrayImage img(w, h);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<std::uint8_t>((rng() % levels) * (255 / (levels - 1)));
    MserParams params;
    params.delta = std::array{1, 5, 30, 60}[trial % 4];
    params.t1_min_area_ratio = 0.01;
    params.max_area_ratio = 0.9;
    params.t2_max_aspect = 4.0;
    params.max_variation = trial % 3 == 0 ? 1e9 : 1.0;
    const TextBlock block = whole_image_block(w, h);
    compare(as_oracle(extract_components(img, block, params)), oracle::exhaustive_mser(img, block, params));
  }
}

TEST_CASE("sub-block extraction matches the oracle on smooth images") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage img(16, 16);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        img.at(x, y) = static_cast<std::uint8_t>(std::clamp<int>(
            128 + 80 * std::sin(0.7 * x + trial) * std::cos(0.5 * y) + static_cast<int>(rng() % 20), 0, 255));
      }
    }
    PixelRegion region;
    for (int y = 2; y < 14; ++y) {
      for (int x = 3; x < 3 + (y % 5) + 8; ++x) {
        region.pixels.push_back({x, y});
        region.bbox.expand({x, y});
      }
    }
    const TextBlock block = make_block(0, region, 16, 16);
    MserParams params;
    params.delta = 8;
    params.max_variation = 2.0;
    params.max_area_ratio = 0.8;
    params.t1_min_area_ratio = 0.01;
    compare(as_oracle(extract_components(img, block, params)), oracle::exhaustive_mser(img, block, params));
  }
}

TEST_CASE("components are nested-free within a polarity") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage img(24, 24);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<std::uint8_t>((rng() % 4) * 80);
    MserParams params;
    params.delta = 40;
    params.max_variation = 1e9;
    params.t1_min_area_ratio = 0.003;
    params.max_area_ratio = 1.0;
    params.t2_max_aspect = 10;
    const auto comps = extract_components(img, whole_image_block(24, 24), params);
    for (std::size_t i = 0; i < comps.size(); ++i) {
      for (std::size_t j = 0; j < comps.size(); ++j) {
        if (i == j || comps[i].polarity != comps[j].polarity) continue;
        const auto& a = comps[i].region.pixels;
        const auto& b = comps[j].region.pixels;
        const bool inside = std::all_of(a.begin(), a.end(), [&](Pixel p) {
          return std::find(b.begin(), b.end(), p) != b.end();
        });
        CHECK_FALSE(inside);
      }
    }
  }
}
