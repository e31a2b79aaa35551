#include <map>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "textdet/blocks.hpp"

using namespace textdet;

TEST_CASE("strict threshold and minimum area") {
  ProbabilityMap sal(10, 10, 0.0);
  for (int y = 1; y <= 5; ++y) {
    for (int x = 1; x <= 5; ++x) sal.at(x, y) = 0.9;
  }
  sal.at(8, 8) = 0.9;
  sal.at(8, 1) = 0.2;  // equal to the threshold: background
  const auto blocks = extract_blocks(sal, 0.2, 20);
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].region.area() == 25);
  CHECK(blocks[0].bbox == BoxI{1, 1, 5, 5});
  CHECK(blocks[0].boundary.size() == 16);
  CHECK(blocks[0].contains({3, 3}));
  CHECK_FALSE(blocks[0].contains({6, 3}));
  CHECK(extract_blocks(sal, 0.2, 1).size() == 2);
  CHECK(extract_blocks(sal, 0.95, 1).empty());
}

TEST_CASE("diagonal pixels join one block") {
  ProbabilityMap sal(6, 6, 0.0);
  for (int i = 0; i < 6; ++i) sal.at(i, i) = 1.0;
  const auto blocks = extract_blocks(sal, 0.5, 1);
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].region.area() == 6);
  CHECK(blocks[0].boundary.size() == 6);
}

TEST_CASE("image-border pixels are boundary pixels") {
  ProbabilityMap sal(3, 3, 1.0);
  const auto blocks = extract_blocks(sal, 0.5, 1);
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].boundary.size() == 8);
  CHECK(std::find(blocks[0].boundary.begin(), blocks[0].boundary.end(), Pixel{1, 1}) == blocks[0].boundary.end());
}

TEST_CASE("blocks agree with relaxation labelling") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int w = 5 + static_cast<int>(rng() % 20);
    const int h = 5 + static_cast<int>(rng() % 20);
    ProbabilityMap sal(w, h);
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t i = 0; i < sal.size(); ++i) sal[i] = u(rng);
    const double threshold = 0.55;
    const int min_area = 1 + static_cast<int>(rng() % 6);
    BinaryMask mask(w, h);
    for (std::size_t i = 0; i < sal.size(); ++i) mask[i] = sal[i] > threshold ? 1 : 0;
    const std::vector<int> labels = oracle::relaxation_labels(mask, true);
    std::map<int, std::vector<int>> groups;
    for (int i = 0; i < w * h; ++i) {
      if (labels[i] >= 0) groups[labels[i]].push_back(i);
    }
    std::vector<std::vector<int>> expected;
    for (auto& [label, members] : groups) {
      if (static_cast<int>(members.size()) >= min_area) expected.push_back(members);
    }
    std::sort(expected.begin(), expected.end());

    const auto blocks = extract_blocks(sal, threshold, min_area);
    REQUIRE(blocks.size() == expected.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const TextBlock& block = blocks[b];
      CHECK(block.id == static_cast<int>(b));
      std::vector<int> got;
      for (const Pixel& p : block.region.pixels) got.push_back(p.y * w + p.x);
      CHECK(got == expected[b]);
      for (const Pixel& p : block.boundary) {
        bool edge = p.x == 0 || p.y == 0 || p.x == w - 1 || p.y == h - 1;
        for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
          if (mask.in_bounds(p.x + dx, p.y + dy) && !block.contains({p.x + dx, p.y + dy})) edge = true;
        }
        CHECK(edge);
      }
      std::size_t interior = 0;
      for (const Pixel& p : block.region.pixels) {
        bool inner = p.x > 0 && p.y > 0 && p.x < w - 1 && p.y < h - 1;
        for (auto [dx, dy] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
          if (inner && !block.contains({p.x + dx, p.y + dy})) inner = false;
        }
        interior += inner ? 1 : 0;
      }
      CHECK(interior + block.boundary.size() == block.region.pixels.size());
    }
  }
}

TEST_CASE("make_block builds mask and boundary from a region") {
  PixelRegion region;
  for (int x = 2; x <= 4; ++x) {
    region.pixels.push_back({x, 3});
    region.bbox.expand({x, 3});
  }
  const TextBlock b = make_block(4, region, 10, 10);
  CHECK(b.id == 4);
  CHECK(b.bbox == BoxI{2, 3, 4, 3});
  CHECK(b.mask == std::vector<std::uint8_t>{1, 1, 1});
  CHECK(b.boundary.size() == 3);
}
