#include "tentpitcher/geometry.hpp"

#include <algorithm>

namespace tentpitcher {

double angle_at(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 u = a - b;
  const Vec2 w = c - b;
  return std::atan2(std::abs(u.cross(w)), u.dot(w));
}

Vec2 foot_of_perpendicular(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 == 0.0)
    throw TpError(ErrorCode::DegenerateSimplex,
                  "foot_of_perpendicular: a == b");
  const double t = (p - a).dot(ab) / len2;
  return a + ab * t;
}

double dist_point_line(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len = ab.norm();
  if (len == 0.0)
    throw TpError(ErrorCode::DegenerateSimplex, "dist_point_line: a == b");
  return std::abs(ab.cross(p - a)) / len;
}

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 == 0.0) return dist(p, a);
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return dist(p, a + ab * t);
}

double TriangleShape::edge_length(int opposite) const {
  return dist(v[(opposite + 1) % 3], v[(opposite + 2) % 3]);
}

double TriangleShape::angle(int corner) const {
  return angle_at(v[(corner + 1) % 3], v[corner], v[(corner + 2) % 3]);
}

double TriangleShape::altitude(int corner) const {
  return dist_point_line(v[corner], v[(corner + 1) % 3], v[(corner + 2) % 3]);
}

double TriangleShape::diameter() const {
  return std::max({edge_length(0), edge_length(1), edge_length(2)});
}

double TriangleShape::width() const {
  return std::min({altitude(0), altitude(1), altitude(2)});
}

bool TriangleShape::degenerate() const {
  const double d = diameter();
  return area() < 1e-12 * d * d;
}

double phi_edge(const TriangleShape& tri, int opposite) {
  const double half_pi = std::asin(1.0);
  const double a1 = tri.angle((opposite + 1) % 3);
  const double a2 = tri.angle((opposite + 2) % 3);
  double result = 1.0;
  if (a1 > half_pi + kObtuseSlack) result = std::min(result, std::sin(a1));
  if (a2 > half_pi + kObtuseSlack) result = std::min(result, std::sin(a2));
  return result;
}

double phi(const TriangleShape& tri) {
  if (tri.degenerate())
    throw TpError(ErrorCode::DegenerateSimplex, "phi: degenerate triangle");
  return std::min({phi_edge(tri, 0), phi_edge(tri, 1), phi_edge(tri, 2)});
}

}  // namespace tentpitcher
