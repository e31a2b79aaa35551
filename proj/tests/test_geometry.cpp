#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "textdet/geometry.hpp"

using namespace textdet;
constexpr double kPi = std::numbers::pi;

namespace {

OrientedRect random_rect(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-10, 10), size(0.5, 12), ang(-kPi, kPi);
  return OrientedRect::make({pos(rng), pos(rng)}, size(rng), size(rng), ang(rng));
}

}  // namespace

TEST_CASE("angle wrapping") {
  CHECK(wrap_half_pi(0.0) == 0.0);
  CHECK(wrap_half_pi(kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_half_pi(-kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_half_pi(kPi) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(wrap_half_pi(3 * kPi / 4) == doctest::Approx(-kPi / 4));
  CHECK(orientation_difference(kPi / 2 - 0.01, -kPi / 2 + 0.01) == doctest::Approx(-0.02));
}

TEST_CASE("oriented rect canonical form") {
  const OrientedRect r = OrientedRect::make({1, 2}, 2, 6, 0.3);
  CHECK(r.length == 6);
  CHECK(r.thickness == 2);
  CHECK(r.angle == doctest::Approx(0.3 + kPi / 2 - kPi));
  const OrientedRect again = r.canonical();
  CHECK(again.length == r.length);
  CHECK(again.angle == r.angle);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const OrientedRect a = random_rect(rng);
    CHECK(a.length >= a.thickness);
    CHECK(a.angle >= -kPi / 2);
    CHECK(a.angle < kPi / 2);
    const OrientedRect b = OrientedRect::from_corners(a.corners());
    CHECK(b.center.x == doctest::Approx(a.center.x).epsilon(1e-9));
    CHECK(b.center.y == doctest::Approx(a.center.y).epsilon(1e-9));
    CHECK(std::abs(b.length - a.length) < 1e-6);
    CHECK(std::abs(b.thickness - a.thickness) < 1e-6);
    CHECK(std::abs(orientation_difference(b.angle, a.angle)) < 1e-6);
    const Point p{a.center.x + 0.3, a.center.y - 0.2};
    const Point q = a.from_local(a.to_local(p));
    CHECK(q.x == doctest::Approx(p.x));
    CHECK(q.y == doctest::Approx(p.y));
  }
}

TEST_CASE("rect intersection: fixed cases") {
  const OrientedRect a = OrientedRect::make({0, 0}, 4, 2, 0);
  CHECK(rect_intersection_area(a, a) == doctest::Approx(8.0));
  const OrientedRect u1 = OrientedRect::make({0, 0}, 1, 1, 0);
  const OrientedRect u2 = OrientedRect::make({10, 10}, 1, 1, 0);
  CHECK(rect_intersection_area(u1, u2) == 0.0);
  CHECK(rect_iou(a, a) == doctest::Approx(1.0));
  // Square against itself rotated 45 degrees leaves a regular octagon.
  const OrientedRect sq = OrientedRect::make({0, 0}, 4, 4, 0);
  const OrientedRect rot = OrientedRect::make({0, 0}, 4, 4, kPi / 4);
  const double exact = rect_intersection_area(sq, rot);
  const double sampled = oracle::sampled_intersection_area(sq, rot, 3200);
  CHECK(std::abs(exact - sampled) / sampled < 1e-2);
  CHECK(exact == doctest::Approx(32 * (std::sqrt(2.0) - 1)).epsilon(1e-9));
}

TEST_CASE("rect intersection agrees with sampling and stays bounded") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 60; ++i) {
    const OrientedRect a = random_rect(rng);
    const OrientedRect b = random_rect(rng);
    const double ab = rect_intersection_area(a, b);
    CHECK(ab == doctest::Approx(rect_intersection_area(b, a)).epsilon(1e-9));
    CHECK(ab <= std::min(a.area(), b.area()) + 1e-9);
    CHECK(ab >= 0.0);
    const double sampled = oracle::sampled_intersection_area(a, b, 600);
    const double scale = std::max(a.area(), b.area());
    CHECK(std::abs(ab - sampled) < 0.01 * scale);
  }
}

TEST_CASE("min area rect: fixed cases") {
  const std::vector<Point> one{{3, 4}};
  const OrientedRect r1 = min_area_oriented_rect(one);
  CHECK(r1.center == Point{3, 4});
  CHECK(r1.length == 0.0);
  CHECK(r1.thickness == 0.0);

  const std::vector<Point> box{{0, 0}, {10, 0}, {10, 4}, {0, 4}};
  const OrientedRect r = min_area_oriented_rect(box);
  CHECK(r.length == doctest::Approx(10));
  CHECK(r.thickness == doctest::Approx(4));
  CHECK(r.angle == doctest::Approx(0.0));
  CHECK(r.center.x == doctest::Approx(5));
  CHECK(r.center.y == doctest::Approx(2));

  const std::vector<Point> line{{0, 0}, {1, 1}, {3, 3}};
  const OrientedRect seg = min_area_oriented_rect(line);
  CHECK(seg.thickness == doctest::Approx(0.0));
  CHECK(seg.length == doctest::Approx(3 * std::sqrt(2.0)));

  CHECK_THROWS_AS(min_area_oriented_rect(std::vector<Point>{}), Error);
}

TEST_CASE("min area rect beats the 1-degree angle sweep and contains all points") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> coord(-20, 20);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 40);
    std::vector<Point> pts;
    const double stretch = 0.2 + (trial % 5) * 0.2;
    for (int i = 0; i < n; ++i) pts.push_back({coord(rng), stretch * coord(rng)});
    const OrientedRect r = min_area_oriented_rect(pts);
    CHECK(r.area() <= oracle::swept_min_area(pts, kPi / 180) + 1e-9);
    // A dense sweep approaches the optimum from above.
    CHECK(oracle::swept_min_area(pts, kPi / 20000) >= r.area() - 1e-9);
    CHECK(oracle::swept_min_area(pts, kPi / 20000) <= r.area() * (1 + 1e-3) + 1e-9);
    for (const Point& p : pts) CHECK(r.contains(p));
    std::vector<Point> shuffled = pts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(min_area_oriented_rect(shuffled).area() == doctest::Approx(r.area()).epsilon(1e-6));
  }
}

TEST_CASE("convex hull is positively oriented and encloses the input") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> coord(-5, 5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 25; ++i) pts.push_back({coord(rng), coord(rng)});
    const auto hull = convex_hull(pts);
    REQUIRE(hull.size() >= 3);
    CHECK(polygon_area(hull) > 0);
    for (const Point& p : pts) {
      for (std::size_t i = 0; i < hull.size(); ++i) {
        CHECK(cross(hull[(i + 1) % hull.size()] - hull[i], p - hull[i]) >= -1e-9);
      }
    }
  }
}

TEST_CASE("axis-aligned hull iou") {
  const OrientedRect a = OrientedRect::make({0, 0}, 4, 2, 0);
  CHECK(axis_iou(axis_hull(a), axis_hull(a)) == doctest::Approx(1.0));
  const OrientedRect rotated = OrientedRect::make({0, 0}, 4, 2, kPi / 2 - 1e-12);
  const AxisBox h = axis_hull(rotated);
  CHECK(h.x1 - h.x0 == doctest::Approx(2));
  CHECK(h.y1 - h.y0 == doctest::Approx(4));
}
