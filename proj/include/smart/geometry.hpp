#pragma once

// Planar primitives shared by every planning stage. All predicates use exact
// double comparisons; boundaries count as contact.

#include <cmath>

namespace smart {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

/// A closed segment; a == b is a point.
struct Segment2 {
  Point2 a;
  Point2 b;
};

struct Disc {
  Point2 center;
  double radius = 0.0;

  friend bool operator==(const Disc&, const Disc&) = default;
};

inline double distance(Point2 p, Point2 q) { return std::hypot(p.x - q.x, p.y - q.y); }

inline double squared_distance(Point2 p, Point2 q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return dx * dx + dy * dy;
}

/// Closest point of the closed segment to p.
inline Point2 closest_point(const Segment2& s, Point2 p) {
  const Point2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) {
    return s.a;
  }
  double t = dot(p - s.a, d) / len2;
  if (t <= 0.0) {
    return s.a;
  }
  if (t >= 1.0) {
    return s.b;
  }
  return s.a + t * d;
}

inline bool point_in_disc(Point2 p, const Disc& d) { return distance(p, d.center) <= d.radius; }

inline bool segment_intersects_disc(const Segment2& s, const Disc& d) {
  return distance(closest_point(s, d.center), d.center) <= d.radius;
}

inline bool discs_intersect(const Disc& a, const Disc& b) {
  return distance(a.center, b.center) <= a.radius + b.radius;
}

}  // namespace smart
