#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tentpitcher {

// Error codes shared across the library.  Ops that fail on bad input throw
// TpError; ops whose failure is ordinary control flow return a status enum.
enum class ErrorCode {
  DegenerateSimplex,
  IsolatedVertex,
  InvalidArgument,
  CausalityAlreadyViolated,
  NotALeaf,
  ClassUndefined,
  InvariantViolation,
  StuckFront,
  BudgetExceeded,
  FrontConformed,
  CycleUnsupported,
  ParseError,
};

class TpError : public std::runtime_error {
 public:
  TpError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dist(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

inline Vec2 midpoint(const Vec2& a, const Vec2& b) {
  return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
}

// Signed twice-area of triangle abc (positive when ccw).
inline double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b - a).cross(c - a);
}

// Angle at vertex b of the wedge a-b-c, in [0, pi].  Computed with atan2
// rather than acos to keep precision near 0 and pi.
double angle_at(const Vec2& a, const Vec2& b, const Vec2& c);

// Orthogonal projection of p onto the line through a and b.  The result may
// lie outside the segment ab.  Throws DegenerateSimplex when a == b.
Vec2 foot_of_perpendicular(const Vec2& p, const Vec2& a, const Vec2& b);

// Distance from p to the line through a and b.
double dist_point_line(const Vec2& p, const Vec2& a, const Vec2& b);

// Distance from p to the closed segment ab.
double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b);

// A triangle given by vertex coordinates, with derived shape quantities.
struct TriangleShape {
  std::array<Vec2, 3> v;

  TriangleShape() = default;
  TriangleShape(const Vec2& a, const Vec2& b, const Vec2& c) : v{a, b, c} {}

  double area() const { return std::abs(signed_area2(v[0], v[1], v[2])) / 2.0; }
  double edge_length(int opposite) const;           // |edge opposite v[opposite]|
  double angle(int corner) const;                   // interior angle at v[corner]
  double altitude(int corner) const;                // dist(v[corner], opposite edge)
  double diameter() const;                          // longest edge
  double width() const;                             // shortest altitude
  bool degenerate() const;                          // area < 1e-12 * diam^2
};

// Obtuse means strictly greater than pi/2 + kObtuseSlack; right angles count
// as non-obtuse, matching the literal definition of phi.
inline constexpr double kObtuseSlack = 1e-12;

// Shape factor phi in (0,1]: 1 for non-obtuse triangles, otherwise the sine
// of the unique obtuse angle (the minimum phi_e over the three edges).
// Throws DegenerateSimplex on degenerate input.
double phi(const TriangleShape& tri);

// phi_e for the edge opposite corner `opposite`: 1 if both angles adjacent
// to that edge are non-obtuse, else the sine of the obtuse one.
double phi_edge(const TriangleShape& tri, int opposite);

}  // namespace tentpitcher
