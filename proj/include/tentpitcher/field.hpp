#pragma once

#include <limits>
#include <vector>

#include "tentpitcher/geometry.hpp"

namespace tentpitcher {

struct STPoint {
  Vec2 x;
  double t = 0.0;

  STPoint() = default;
  STPoint(const Vec2& x_, double t_) : x(x_), t(t_) {}
  STPoint(double px, double py, double t_) : x(px, py), t(t_) {}
};

// A spacetime simplex: 2 vertices (segment), 3 (triangle), or 4 (tet).
using STSimplex = std::vector<STPoint>;

enum class RegionShape { Disc, HalfPlane, Rect };

// One field region: a convex spatial shape crossed with a time interval.
// Later regions in the list override earlier ones where they overlap.
struct FieldRegion {
  RegionShape shape = RegionShape::Disc;
  Vec2 center;            // Disc: center. HalfPlane: a point on the boundary.
  double radius = 0.0;    // Disc only
  Vec2 normal;            // HalfPlane: inside is normal.dot(x - center) <= 0
  Vec2 lo, hi;            // Rect corners
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  double value = 1.0;     // causal slope S inside the region

  bool contains_spatial(const Vec2& p) const;
  bool contains(const STPoint& p) const {
    return p.t >= t0 && p.t <= t1 && contains_spatial(p.x);
  }
};

// Piecewise-constant causal slope field S(P) over spacetime.  Serves as the
// ground-truth stand-in for solver-computed wavespeeds.  The invariant that
// S is non-increasing in time at every fixed spatial point is the caller's
// responsibility; audit_time_monotone spot-checks it.
struct WavespeedField {
  double default_value = 1.0;
  std::vector<FieldRegion> regions;

  // Slope of the innermost (latest-listed) region containing P, else default.
  double slope_at(const STPoint& p) const;

  double min_slope() const;   // global min over default and all regions
  double max_slope() const;

  // Exact min/max of S over a spacetime simplex for regions that are
  // pairwise disjoint or fully nested; conservative (never unsafe) when
  // regions partially overlap.
  double min_slope_over(const STSimplex& s) const;
  double max_slope_over(const STSimplex& s) const;

  static WavespeedField constant(double s) {
    WavespeedField f;
    f.default_value = s;
    return f;
  }
};

// Samples n random (p, t < t') pairs inside the given spatial box and time
// window; returns true when S(p,t') <= S(p,t) held for every sample.
bool audit_time_monotone(const WavespeedField& field, const Vec2& lo,
                         const Vec2& hi, double tmax, int n, unsigned seed);

}  // namespace tentpitcher
