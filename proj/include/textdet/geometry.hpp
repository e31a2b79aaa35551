#pragma once

#include <array>
#include <numbers>
#include <span>
#include <vector>

namespace textdet {

// Image coordinates: x grows right, y grows down, pixel (x, y) has its center
// at (x, y). Angles are atan2(dy, dx) in that frame.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double distance(Point a, Point b);

/// Maps any angle into [-pi/2, pi/2) (orientation modulo pi).
double wrap_half_pi(double angle);

/// Signed difference a - b of two orientations, wrapped into [-pi/2, pi/2).
double orientation_difference(double a, double b);

struct OrientedRect {
  Point center;
  double length = 0.0;     // extent along `angle`
  double thickness = 0.0;  // extent across it; length >= thickness
  double angle = 0.0;      // in [-pi/2, pi/2)

  /// Builds a canonical rect from extents along and across `angle`; the
  /// longer side becomes `length`.
  static OrientedRect make(Point center, double along, double across, double angle);

  OrientedRect canonical() const { return make(center, length, thickness, angle); }

  Point direction() const;
  Point normal() const;
  double area() const { return length * thickness; }

  /// Corners in counter-clockwise order of the y-down frame, starting at
  /// (-length/2, -thickness/2) in the local frame.
  std::array<Point, 4> corners() const;

  /// Recovers a rect from corners as produced by corners().
  static OrientedRect from_corners(const std::array<Point, 4>& corners);

  /// Local frame: u along direction(), v along normal(), origin at center.
  Point to_local(Point p) const;
  Point from_local(Point uv) const;

  bool contains(Point p, double slack = 1e-6) const;
};

struct AxisBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double area() const { return (x1 - x0) * (y1 - y0); }
};

AxisBox axis_hull(const OrientedRect& rect);
double axis_iou(const AxisBox& a, const AxisBox& b);

double polygon_area(std::span<const Point> polygon);

/// Convex polygon clipping (Sutherland-Hodgman); both inputs counter-clockwise
/// with positive shoelace area.
std::vector<Point> clip_convex(std::span<const Point> subject, std::span<const Point> clip);

double rect_intersection_area(const OrientedRect& a, const OrientedRect& b);
double rect_iou(const OrientedRect& a, const OrientedRect& b);

/// Convex hull (monotone chain), collinear points dropped, positive orientation.
std::vector<Point> convex_hull(std::vector<Point> points);

/// Minimum-area enclosing rectangle via a sweep over hull edge directions.
OrientedRect min_area_oriented_rect(std::span<const Point> points);

/// Tight rectangle around `points` with its length axis fixed at `angle`.
OrientedRect fit_rect_at_angle(std::span<const Point> points, double angle);

}  // namespace textdet
