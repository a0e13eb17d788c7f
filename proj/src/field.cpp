#include "tentpitcher/field.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tentpitcher {

bool FieldRegion::contains_spatial(const Vec2& p) const {
  switch (shape) {
    case RegionShape::Disc:
      return dist(p, center) <= radius;
    case RegionShape::HalfPlane:
      return normal.dot(p - center) <= 0.0;
    case RegionShape::Rect:
      return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
  }
  return false;
}

double WavespeedField::slope_at(const STPoint& p) const {
  for (auto it = regions.rbegin(); it != regions.rend(); ++it)
    if (it->contains(p)) return it->value;
  return default_value;
}

double WavespeedField::min_slope() const {
  double s = default_value;
  for (const auto& r : regions) s = std::min(s, r.value);
  return s;
}

double WavespeedField::max_slope() const {
  double s = default_value;
  for (const auto& r : regions) s = std::max(s, r.value);
  return s;
}

namespace {

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  const int n = static_cast<int>(pts.size());
  if (n <= 2) return pts;
  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 &&
           signed_area2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0)
      --k;
    hull[k++] = pts[i];
  }
  const int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower &&
           signed_area2(hull[k - 2], hull[k - 1], pts[i]) <= 0.0)
      --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool point_in_hull(const Vec2& p, const std::vector<Vec2>& hull) {
  const int n = static_cast<int>(hull.size());
  if (n == 0) return false;
  if (n == 1) return dist(p, hull[0]) == 0.0;
  if (n == 2) return dist_point_segment(p, hull[0], hull[1]) == 0.0;
  for (int i = 0; i < n; ++i)
    if (signed_area2(hull[i], hull[(i + 1) % n], p) < 0.0) return false;
  return true;
}

double dist_point_hull(const Vec2& p, const std::vector<Vec2>& hull) {
  const int n = static_cast<int>(hull.size());
  if (n == 0) return std::numeric_limits<double>::infinity();
  if (n == 1) return dist(p, hull[0]);
  if (point_in_hull(p, hull)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    d = std::min(d, dist_point_segment(p, hull[i], hull[(i + 1) % n]));
  return d;
}

void project(const std::vector<Vec2>& pts, const Vec2& axis, double& lo,
             double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const auto& p : pts) {
    const double v = p.dot(axis);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
}

void add_axes(const std::vector<Vec2>& poly, std::vector<Vec2>& axes) {
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Vec2 e = poly[(i + 1) % n] - poly[i];
    if (e.norm2() > 0.0) axes.push_back({-e.y, e.x});
  }
}

bool convex_point_sets_intersect(const std::vector<Vec2>& a,
                                 const std::vector<Vec2>& b) {
  if (a.empty() || b.empty()) return false;
  std::vector<Vec2> axes;
  add_axes(a, axes);
  add_axes(b, axes);
  if (axes.empty()) axes.push_back({1.0, 0.0});  // two single points
  axes.push_back({1.0, 0.0});
  axes.push_back({0.0, 1.0});
  for (const auto& axis : axes) {
    double alo, ahi, blo, bhi;
    project(a, axis, alo, ahi);
    project(b, axis, blo, bhi);
    if (ahi < blo || bhi < alo) return false;
  }
  return true;
}

// Spatial projection of the simplex clipped to the time slab [t0, t1].
std::vector<Vec2> clip_to_slab(const STSimplex& s, double t0, double t1) {
  std::vector<Vec2> pts;
  const int n = static_cast<int>(s.size());
  for (const auto& p : s)
    if (p.t >= t0 && p.t <= t1) pts.push_back(p.x);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double ti = s[i].t, tj = s[j].t;
      if (ti == tj) continue;
      for (double tc : {t0, t1}) {
        if (!std::isfinite(tc)) continue;
        const double u = (tc - ti) / (tj - ti);
        if (u > 0.0 && u < 1.0) pts.push_back(s[i].x + (s[j].x - s[i].x) * u);
      }
    }
  }
  return pts;
}

bool region_intersects(const FieldRegion& r, const STSimplex& s) {
  const std::vector<Vec2> pts = clip_to_slab(s, r.t0, r.t1);
  if (pts.empty()) return false;
  switch (r.shape) {
    case RegionShape::Disc:
      return dist_point_hull(r.center, convex_hull(pts)) <= r.radius;
    case RegionShape::HalfPlane: {
      double lo = std::numeric_limits<double>::infinity();
      for (const auto& p : pts) lo = std::min(lo, r.normal.dot(p - r.center));
      return lo <= 0.0;
    }
    case RegionShape::Rect: {
      const std::vector<Vec2> box = {{r.lo.x, r.lo.y},
                                     {r.hi.x, r.lo.y},
                                     {r.hi.x, r.hi.y},
                                     {r.lo.x, r.hi.y}};
      return convex_point_sets_intersect(convex_hull(pts), box);
    }
  }
  return false;
}

bool region_contains_all(const FieldRegion& r, const STSimplex& s) {
  for (const auto& p : s)
    if (!r.contains(p)) return false;
  return true;
}

}  // namespace

double WavespeedField::min_slope_over(const STSimplex& s) const {
  double best = std::numeric_limits<double>::infinity();
  bool covered = false;
  const int k = static_cast<int>(regions.size());
  for (int i = k - 1; i >= 0; --i) {
    if (!region_intersects(regions[i], s)) continue;
    bool overridden = false;
    for (int j = i + 1; j < k && !overridden; ++j)
      overridden = region_contains_all(regions[j], s);
    if (!overridden) best = std::min(best, regions[i].value);
    if (region_contains_all(regions[i], s)) covered = true;
  }
  if (!covered) best = std::min(best, default_value);
  return best;
}

double WavespeedField::max_slope_over(const STSimplex& s) const {
  double best = -std::numeric_limits<double>::infinity();
  bool covered = false;
  const int k = static_cast<int>(regions.size());
  for (int i = k - 1; i >= 0; --i) {
    if (!region_intersects(regions[i], s)) continue;
    bool overridden = false;
    for (int j = i + 1; j < k && !overridden; ++j)
      overridden = region_contains_all(regions[j], s);
    if (!overridden) best = std::max(best, regions[i].value);
    if (region_contains_all(regions[i], s)) covered = true;
  }
  if (!covered) best = std::max(best, default_value);
  return best;
}

bool audit_time_monotone(const WavespeedField& field, const Vec2& lo,
                         const Vec2& hi, double tmax, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](double a, double b) {
    return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  for (int i = 0; i < n; ++i) {
    const Vec2 p(uniform(lo.x, hi.x), uniform(lo.y, hi.y));
    const double t = uniform(0.0, tmax);
    const double dt = uniform(0.0, tmax - t);
    if (field.slope_at({p, t + dt}) > field.slope_at({p, t}) + 1e-15)
      return false;
  }
  return true;
}

}  // namespace tentpitcher
