#include "textdet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "textdet/errors.hpp"

namespace textdet {

namespace {
constexpr double kPi = std::numbers::pi;
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double wrap_half_pi(double angle) {
  if (angle >= -kPi / 2 && angle < kPi / 2) return angle;
  double wrapped = angle - kPi * std::floor((angle + kPi / 2) / kPi);
  if (wrapped >= kPi / 2) wrapped -= kPi;
  if (wrapped < -kPi / 2) wrapped += kPi;
  return wrapped;
}

double orientation_difference(double a, double b) { return wrap_half_pi(a - b); }

OrientedRect OrientedRect::make(Point center, double along, double across, double angle) {
  OrientedRect r;
  r.center = center;
  along = std::max(along, 0.0);
  across = std::max(across, 0.0);
  if (along >= across) {
    r.length = along;
    r.thickness = across;
    r.angle = wrap_half_pi(angle);
  } else {
    r.length = across;
    r.thickness = along;
    r.angle = wrap_half_pi(angle + kPi / 2);
  }
  return r;
}

Point OrientedRect::direction() const { return {std::cos(angle), std::sin(angle)}; }
Point OrientedRect::normal() const { return {-std::sin(angle), std::cos(angle)}; }

std::array<Point, 4> OrientedRect::corners() const {
  const double hl = length / 2;
  const double ht = thickness / 2;
  return {from_local({-hl, -ht}), from_local({hl, -ht}), from_local({hl, ht}), from_local({-hl, ht})};
}

OrientedRect OrientedRect::from_corners(const std::array<Point, 4>& c) {
  const Point center = 0.25 * (c[0] + c[1] + c[2] + c[3]);
  const Point along = c[1] - c[0];
  const Point across = c[3] - c[0];
  return make(center, std::hypot(along.x, along.y), std::hypot(across.x, across.y),
              std::atan2(along.y, along.x));
}

Point OrientedRect::to_local(Point p) const {
  const Point d = p - center;
  return {dot(d, direction()), dot(d, normal())};
}

Point OrientedRect::from_local(Point uv) const {
  return center + uv.x * direction() + uv.y * normal();
}

bool OrientedRect::contains(Point p, double slack) const {
  const Point uv = to_local(p);
  return std::abs(uv.x) <= length / 2 + slack && std::abs(uv.y) <= thickness / 2 + slack;
}

AxisBox axis_hull(const OrientedRect& rect) {
  AxisBox box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Point& p : rect.corners()) {
    box.x0 = std::min(box.x0, p.x);
    box.y0 = std::min(box.y0, p.y);
    box.x1 = std::max(box.x1, p.x);
    box.y1 = std::max(box.y1, p.y);
  }
  return box;
}

double axis_iou(const AxisBox& a, const AxisBox& b) {
  const double iw = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double ih = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  const double inter = (iw > 0 && ih > 0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

double polygon_area(std::span<const Point> polygon) {
  if (polygon.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    twice += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  }
  return twice / 2;
}

std::vector<Point> clip_convex(std::span<const Point> subject, std::span<const Point> clip) {
  std::vector<Point> output(subject.begin(), subject.end());
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Point a = clip[e];
    const Point b = clip[(e + 1) % clip.size()];
    const Point edge = b - a;
    auto side = [&](Point p) { return cross(edge, p - a); };
    std::vector<Point> input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Point cur = input[i];
      const Point prev = input[(i + input.size() - 1) % input.size()];
      const double s_cur = side(cur);
      const double s_prev = side(prev);
      if (s_cur >= 0) {
        if (s_prev < 0) output.push_back(prev + (s_prev / (s_prev - s_cur)) * (cur - prev));
        output.push_back(cur);
      } else if (s_prev >= 0) {
        output.push_back(prev + (s_prev / (s_prev - s_cur)) * (cur - prev));
      }
    }
  }
  return output;
}

double rect_intersection_area(const OrientedRect& a, const OrientedRect& b) {
  if (a.area() <= 0 || b.area() <= 0) return 0.0;
  const auto ca = a.corners();
  const auto cb = b.corners();
  const auto clipped = clip_convex(ca, cb);
  const double area = polygon_area(clipped);
  return std::clamp(area, 0.0, std::min(a.area(), b.area()));
}

double rect_iou(const OrientedRect& a, const OrientedRect& b) {
  const double inter = rect_intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

std::vector<Point> convex_hull(std::vector<Point> points) {
  std::sort(points.begin(), points.end(),
            [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 3) return points;
  std::vector<Point> hull(2 * points.size());
  std::size_t k = 0;
  for (const Point& p : points) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    const Point p = points[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

OrientedRect fit_rect_at_angle(std::span<const Point> points, double angle) {
  if (points.empty()) throw Error(ErrorCode::kEmptyInput, "empty point set");
  const Point d{std::cos(angle), std::sin(angle)};
  const Point n{-d.y, d.x};
  double umin = std::numeric_limits<double>::infinity(), umax = -umin;
  double vmin = umin, vmax = -umin;
  for (const Point& p : points) {
    const double u = dot(p, d);
    const double v = dot(p, n);
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const double uc = (umin + umax) / 2;
  const double vc = (vmin + vmax) / 2;
  const Point center = uc * d + vc * n;
  return OrientedRect::make(center, umax - umin, vmax - vmin, angle);
}

OrientedRect min_area_oriented_rect(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorCode::kEmptyInput, "empty point set");
  const std::vector<Point> hull = convex_hull({points.begin(), points.end()});
  if (hull.size() == 1) return OrientedRect::make(hull[0], 0.0, 0.0, 0.0);
  if (hull.size() == 2) {
    const Point e = hull[1] - hull[0];
    return OrientedRect::make(0.5 * (hull[0] + hull[1]), std::hypot(e.x, e.y), 0.0, std::atan2(e.y, e.x));
  }
  OrientedRect best;
  double best_area = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point e = hull[(i + 1) % hull.size()] - hull[i];
    const OrientedRect r = fit_rect_at_angle(hull, std::atan2(e.y, e.x));
    // Keep the first minimum so the result does not depend on float noise
    // between equivalent edges.
    if (i == 0 || r.area() < best_area - 1e-9 * std::max(1.0, best_area)) {
      best_area = r.area();
      best = r;
    }
  }
  return best;
}

}  // namespace textdet
