#include "tentpitcher/cones.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace tentpitcher {

namespace {

// Exact minimum of t(s) + slope * |x - q(s)| along the spacetime segment
// from a to b, s in [0, 1].  The derivative root reduces to a quadratic.
double min_entry_on_segment(const Vec2& x, const STPoint& a, const STPoint& b,
                            double slope) {
  const Vec2 d = b.x - a.x;
  const Vec2 w = x - a.x;
  const double L2 = d.norm2();
  const double dt = b.t - a.t;
  auto value = [&](double s) {
    return a.t + s * dt + slope * (w - d * s).norm();
  };
  double best = std::min(value(0.0), value(1.0));
  if (L2 > 0.0) {
    const double W = w.dot(d);
    best = std::min(best, value(std::clamp(W / L2, 0.0, 1.0)));
    const double W2 = w.norm2();
    const double s2 = slope * slope;
    const double qa = s2 * L2 * L2 - dt * dt * L2;
    const double qb = -2.0 * L2 * W * s2 + 2.0 * W * dt * dt;
    const double qc = s2 * W * W - dt * dt * W2;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0 && qa != 0.0) {
      const double sq = std::sqrt(disc);
      for (double root : {(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)})
        if (root > 0.0 && root < 1.0) best = std::min(best, value(root));
    }
  }
  return best;
}

}  // namespace

double FacetCone::entry_time(const Vec2& x) const {
  double best = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(facet.size());
  for (const auto& p : facet)
    best = std::min(best, p.t + slope * dist(x, p.x));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      best = std::min(best, min_entry_on_segment(x, facet[i], facet[j], slope));
  if (n == 3) {
    // Interior kink: x inside the spatial triangle gives the facet's own
    // time at x.
    const Vec2 u = facet[1].x - facet[0].x;
    const Vec2 w = facet[2].x - facet[0].x;
    const double det = u.cross(w);
    if (det != 0.0) {
      const Vec2 r = x - facet[0].x;
      const double bu = r.cross(w) / det;
      const double bw = u.cross(r) / det;
      if (bu >= 0.0 && bw >= 0.0 && bu + bw <= 1.0) {
        const double t_lin = facet[0].t + bu * (facet[1].t - facet[0].t) +
                             bw * (facet[2].t - facet[0].t);
        best = std::min(best, t_lin);
      }
    }
  }
  return best;
}

double BoxCone::entry_time(const Vec2& x) const {
  const double dx = std::max({0.0, xlo.x - x.x, x.x - xhi.x});
  const double dy = std::max({0.0, xlo.y - x.y, x.y - xhi.y});
  return tlo + slope * std::hypot(dx, dy);
}

BoxCone BoxCone::of_facet(const FacetCone& fc) {
  BoxCone box;
  box.xlo = {std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
  box.xhi = {-box.xlo.x, -box.xlo.y};
  box.tlo = std::numeric_limits<double>::infinity();
  for (const auto& p : fc.facet) {
    box.xlo.x = std::min(box.xlo.x, p.x.x);
    box.xlo.y = std::min(box.xlo.y, p.x.y);
    box.xhi.x = std::max(box.xhi.x, p.x.x);
    box.xhi.y = std::max(box.xhi.y, p.x.y);
    box.tlo = std::min(box.tlo, p.t);
  }
  box.slope = fc.slope;
  return box;
}

BoxCone BoxCone::merge(const BoxCone& a, const BoxCone& b) {
  BoxCone box;
  box.xlo = {std::min(a.xlo.x, b.xlo.x), std::min(a.xlo.y, b.xlo.y)};
  box.xhi = {std::max(a.xhi.x, b.xhi.x), std::max(a.xhi.y, b.xhi.y)};
  box.tlo = std::min(a.tlo, b.tlo);
  box.slope = std::min(a.slope, b.slope);
  return box;
}

bool BoxCone::contains(const BoxCone& other) const {
  return slope <= other.slope && tlo <= other.tlo &&
         xlo.x <= other.xlo.x && xlo.y <= other.xlo.y &&
         xhi.x >= other.xhi.x && xhi.y >= other.xhi.y;
}

namespace {

// Minimizes a convex function over the simplex spanned by pts, by nested
// ternary search on the last barycentric coordinate.  stop_below short-cuts
// the sign decision.
double simplex_min(const std::function<double(const STPoint&)>& f,
                   const std::vector<STPoint>& pts, int iters,
                   double stop_below) {
  if (pts.size() == 1) return f(pts[0]);
  const STPoint apex = pts.back();
  std::vector<STPoint> rest(pts.begin(), pts.end() - 1);
  auto slice = [&](double lambda) {
    std::vector<STPoint> shrunk(rest.size());
    for (size_t i = 0; i < rest.size(); ++i) {
      shrunk[i].x = rest[i].x * (1.0 - lambda) + apex.x * lambda;
      shrunk[i].t = rest[i].t * (1.0 - lambda) + apex.t * lambda;
    }
    return simplex_min(f, shrunk, iters, stop_below);
  };
  double lo = 0.0, hi = 1.0;
  double best = std::min(slice(0.0), slice(1.0));
  if (best < stop_below) return best;
  for (int i = 0; i < iters; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double f1 = slice(m1);
    const double f2 = slice(m2);
    best = std::min({best, f1, f2});
    if (best < stop_below) return best;
    if (f1 <= f2)
      hi = m2;
    else
      lo = m1;
  }
  return best;
}

// 1-d ternary minimum of the convex clearance g along a spacetime segment.
double segment_min(const std::function<double(const STPoint&)>& g,
                   const STPoint& a, const STPoint& b, int iters,
                   double stop_below) {
  auto at = [&](double s) {
    return g({a.x * (1.0 - s) + b.x * s, a.t * (1.0 - s) + b.t * s});
  };
  double lo = 0.0, hi = 1.0;
  double best = std::min(at(0.0), at(1.0));
  if (best < stop_below) return best;
  for (int i = 0; i < iters; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double f1 = at(m1);
    const double f2 = at(m2);
    best = std::min({best, f1, f2});
    if (best < stop_below) return best;
    if (f1 <= f2)
      hi = m2;
    else
      lo = m1;
  }
  return best;
}

// Clips the 2D segment ab against a convex polygon (ccw or cw); returns
// false when the overlap is empty.
bool clip_segment_to_polygon(const std::vector<Vec2>& poly, Vec2& a, Vec2& b) {
  const int n = static_cast<int>(poly.size());
  if (n < 3) return false;
  const double orient =
      signed_area2(poly[0], poly[1], poly[2 % n]) >= 0 ? 1.0 : -1.0;
  double s0 = 0.0, s1 = 1.0;
  const Vec2 d = b - a;
  for (int i = 0; i < n; ++i) {
    const Vec2 e0 = poly[i];
    const Vec2 e1 = poly[(i + 1) % n];
    const double fa = orient * signed_area2(e0, e1, a);
    const double fb = orient * signed_area2(e0, e1, a + d);
    // inside: f >= 0
    if (fa < 0 && fb < 0) return false;
    if (fa >= 0 && fb >= 0) continue;
    const double cross = fa / (fa - fb);
    if (fa < 0)
      s0 = std::max(s0, cross);
    else
      s1 = std::min(s1, cross);
    if (s0 > s1) return false;
  }
  const Vec2 na = a + d * s0;
  const Vec2 nb = a + d * s1;
  a = na;
  b = nb;
  return true;
}

// Minimum clearance of a spacetime triangle below a cone whose entry slope
// is the cone slope away from its apex-region "kink".  Away from the kink
// the clearance restricted to the triangle's plane has no interior
// stationary point (the causal plane is shallower than the cone), and over
// the kink it is linear, so the minimum lies on the triangle's edges or on
// the kink boundary clipped to the triangle.
double triangle_clearance(const std::function<double(const STPoint&)>& g,
                          const STSimplex& tri,
                          const std::vector<Vec2>& kink_poly, int iters,
                          double stop_below) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3 && best >= stop_below; ++i)
    best = std::min(best, segment_min(g, tri[i], tri[(i + 1) % 3], iters,
                                      stop_below));
  if (best < stop_below || kink_poly.empty()) return best;

  // Plane interpolation of t over the triangle.
  const Vec2 u = tri[1].x - tri[0].x;
  const Vec2 w = tri[2].x - tri[0].x;
  const double det = u.cross(w);
  if (det == 0.0) return best;
  auto plane_t = [&](const Vec2& x) {
    const Vec2 r = x - tri[0].x;
    const double bu = r.cross(w) / det;
    const double bw = u.cross(r) / det;
    return tri[0].t + bu * (tri[1].t - tri[0].t) + bw * (tri[2].t - tri[0].t);
  };
  const std::vector<Vec2> proj = {tri[0].x, tri[1].x, tri[2].x};
  const int n = static_cast<int>(kink_poly.size());
  for (int i = 0; i < n && best >= stop_below; ++i) {
    Vec2 a = kink_poly[i];
    Vec2 b = kink_poly[(i + 1) % n];
    if (n == 2 && i == 1) break;
    if (!clip_segment_to_polygon(proj, a, b)) continue;
    best = std::min(best, segment_min(g, {a, plane_t(a)}, {b, plane_t(b)},
                                      iters, stop_below));
  }
  return best;
}

}  // namespace

double cone_clearance(const std::function<double(const Vec2&)>& entry,
                      const STSimplex& s) {
  auto g = [&](const STPoint& p) { return entry(p.x) - p.t; };
  const int iters = (s.size() <= 2) ? 110 : (s.size() == 3 ? 60 : 45);
  return simplex_min(g, s, iters, -std::numeric_limits<double>::infinity());
}

namespace {

double clearance_with_kink(const std::function<double(const STPoint&)>& g,
                           const STSimplex& s,
                           const std::vector<Vec2>& kink_poly) {
  if (s.size() == 2) return segment_min(g, s[0], s[1], 110, 0.0);
  if (s.size() == 3) return triangle_clearance(g, s, kink_poly, 90, 0.0);
  return simplex_min(g, s, 45, 0.0);
}

}  // namespace

bool cone_intersects(const FacetCone& cone, const STSimplex& s, double tol) {
  // Cheap bounds first: entirely below the cone apex, or a vertex already
  // inside.
  double tmax = -std::numeric_limits<double>::infinity();
  for (const auto& p : s) tmax = std::max(tmax, p.t);
  const BoxCone box = BoxCone::of_facet(cone);
  double lb = std::numeric_limits<double>::infinity();
  for (const auto& p : s) lb = std::min(lb, box.entry_time(p.x));
  if (lb - tmax > -tol) return false;
  for (const auto& p : s)
    if (cone.entry_time(p.x) - p.t < -tol) return true;
  auto g = [&](const STPoint& p) { return cone.entry_time(p.x) - p.t; };
  std::vector<Vec2> kink;
  for (const auto& q : cone.facet) kink.push_back(q.x);
  return clearance_with_kink(g, s, kink) < -tol;
}

namespace {

bool box_cone_intersects(const BoxCone& box, const STSimplex& s, double tol) {
  double tmax = -std::numeric_limits<double>::infinity();
  for (const auto& p : s) tmax = std::max(tmax, p.t);
  double lb = std::numeric_limits<double>::infinity();
  for (const auto& p : s) lb = std::min(lb, box.entry_time(p.x));
  if (lb - tmax > -tol) return false;
  for (const auto& p : s)
    if (box.entry_time(p.x) - p.t < -tol) return true;
  auto g = [&](const STPoint& p) { return box.entry_time(p.x) - p.t; };
  const std::vector<Vec2> kink = {box.xlo,
                                  {box.xhi.x, box.xlo.y},
                                  box.xhi,
                                  {box.xlo.x, box.xhi.y}};
  return clearance_with_kink(g, s, kink) < -tol;
}

}  // namespace

void BoundingConeHierarchy::build(const Front& front,
                                  const WavespeedField& field) {
  nodes_.clear();
  leaf_of_tri_.clear();
  root_ = -1;
  std::vector<FacetCone> cones;
  std::vector<int> tri_ids;
  for (int t : front.tri->leaves()) {
    FacetCone fc;
    fc.facet = front.facet(t);
    fc.slope = field.min_slope_over(fc.facet);
    cones.push_back(fc);
    tri_ids.push_back(t);
  }
  if (cones.empty()) return;
  std::vector<int> ids(cones.size());
  for (size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  root_ = build_rec(ids, 0, static_cast<int>(ids.size()), cones, tri_ids, -1);
}

int BoundingConeHierarchy::build_rec(std::vector<int>& ids, int lo, int hi,
                                     const std::vector<FacetCone>& cones,
                                     const std::vector<int>& tri_ids,
                                     int parent) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  nodes_[id].parent = parent;
  if (hi - lo == 1) {
    const int k = ids[lo];
    nodes_[id].tri_id = tri_ids[k];
    nodes_[id].leaf = cones[k];
    nodes_[id].box = BoxCone::of_facet(cones[k]);
    leaf_of_tri_[tri_ids[k]] = id;
    return id;
  }
  // Median split along the longer axis of the centroid spread.
  Vec2 lo_c{std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  Vec2 hi_c{-lo_c.x, -lo_c.y};
  auto centroid = [&](int k) {
    Vec2 c{0, 0};
    for (const auto& p : cones[k].facet) c += p.x;
    return c / static_cast<double>(cones[k].facet.size());
  };
  for (int i = lo; i < hi; ++i) {
    const Vec2 c = centroid(ids[i]);
    lo_c.x = std::min(lo_c.x, c.x);
    lo_c.y = std::min(lo_c.y, c.y);
    hi_c.x = std::max(hi_c.x, c.x);
    hi_c.y = std::max(hi_c.y, c.y);
  }
  const bool split_x = (hi_c.x - lo_c.x) >= (hi_c.y - lo_c.y);
  const int mid = (lo + hi) / 2;
  std::nth_element(ids.begin() + lo, ids.begin() + mid, ids.begin() + hi,
                   [&](int a, int b) {
                     const Vec2 ca = centroid(a), cb = centroid(b);
                     return split_x ? ca.x < cb.x : ca.y < cb.y;
                   });
  const int left = build_rec(ids, lo, mid, cones, tri_ids, id);
  const int right = build_rec(ids, mid, hi, cones, tri_ids, id);
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].box = BoxCone::merge(nodes_[left].box, nodes_[right].box);
  return id;
}

BoundingConeHierarchy::RayHit BoundingConeHierarchy::first_entry_vertical(
    const Vec2& x, const Exclude& exclude) const {
  RayHit hit;
  if (root_ < 0) return hit;
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  queue.push({nodes_[root_].box.entry_time(x), root_});
  while (!queue.empty()) {
    const auto [t, id] = queue.top();
    queue.pop();
    if (t >= hit.t) break;
    const Node& node = nodes_[id];
    if (node.tri_id >= 0) {
      if (exclude && exclude(node.tri_id)) continue;
      const double te = node.leaf.entry_time(x);
      if (te < hit.t) {
        hit.t = te;
        hit.tri_id = node.tri_id;
      }
    } else {
      queue.push({nodes_[node.left].box.entry_time(x), node.left});
      queue.push({nodes_[node.right].box.entry_time(x), node.right});
    }
  }
  return hit;
}

double BoundingConeHierarchy::min_slope_intersecting(
    const STSimplex& s, const Exclude& exclude) const {
  if (root_ < 0) return std::numeric_limits<double>::infinity();
  using Entry = std::pair<double, int>;  // (slope, node)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  queue.push({nodes_[root_].box.slope, root_});
  while (!queue.empty()) {
    const auto [slope, id] = queue.top();
    queue.pop();
    const Node& node = nodes_[id];
    if (node.tri_id >= 0) {
      if (exclude && exclude(node.tri_id)) continue;
      if (cone_intersects(node.leaf, s)) return node.leaf.slope;
    } else {
      if (!box_cone_intersects(node.box, s, 0.0)) continue;
      queue.push({nodes_[node.left].box.slope, node.left});
      queue.push({nodes_[node.right].box.slope, node.right});
    }
  }
  return std::numeric_limits<double>::infinity();
}

bool BoundingConeHierarchy::any_cone_intersecting(const STSimplex& s,
                                                  const Exclude& exclude,
                                                  double tol) const {
  if (root_ < 0) return false;
  std::vector<int> stack = {root_};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (node.tri_id >= 0) {
      if (exclude && exclude(node.tri_id)) continue;
      if (cone_intersects(node.leaf, s, tol)) return true;
    } else {
      if (!box_cone_intersects(node.box, s, tol)) continue;
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return false;
}

void BoundingConeHierarchy::update_leaf(int tri_id, const STSimplex& facet,
                                        double slope) {
  auto it = leaf_of_tri_.find(tri_id);
  if (it == leaf_of_tri_.end()) return;
  Node& node = nodes_[it->second];
  node.leaf.facet = facet;
  node.leaf.slope = slope;
  node.box = BoxCone::of_facet(node.leaf);
  retighten(node.parent);
}

void BoundingConeHierarchy::retighten(int node) {
  while (node >= 0) {
    nodes_[node].box = BoxCone::merge(nodes_[nodes_[node].left].box,
                                      nodes_[nodes_[node].right].box);
    node = nodes_[node].parent;
  }
}

bool BoundingConeHierarchy::audit_containment() const {
  for (const auto& node : nodes_) {
    if (node.tri_id >= 0) continue;
    if (!node.box.contains(nodes_[node.left].box)) return false;
    if (!node.box.contains(nodes_[node.right].box)) return false;
  }
  return true;
}

BoundingConeHierarchy::RayHit BoundingConeHierarchy::scan_first_entry_vertical(
    const Vec2& x, const Exclude& exclude) const {
  RayHit hit;
  for (const auto& node : nodes_) {
    if (node.tri_id < 0) continue;
    if (exclude && exclude(node.tri_id)) continue;
    const double t = node.leaf.entry_time(x);
    if (t < hit.t) {
      hit.t = t;
      hit.tri_id = node.tri_id;
    }
  }
  return hit;
}

double BoundingConeHierarchy::scan_min_slope_intersecting(
    const STSimplex& s, const Exclude& exclude) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& node : nodes_) {
    if (node.tri_id < 0) continue;
    if (exclude && exclude(node.tri_id)) continue;
    if (node.leaf.slope < best && cone_intersects(node.leaf, s))
      best = node.leaf.slope;
  }
  return best;
}

double t_remote_exact_1d(const Front& front, int p,
                         const BoundingConeHierarchy& hierarchy) {
  const auto& star = front.tri->leaves_at_vertex(p);
  auto exclude = [&star](int t) {
    return std::find(star.begin(), star.end(), t) != star.end();
  };
  return hierarchy.first_entry_vertical(front.tri->pos[p], exclude).t;
}

double t_remote_binary_search(const Front& front, int p,
                              const BoundingConeHierarchy& hierarchy,
                              double lo, double hi, double tol,
                              int* iterations) {
  if (iterations) *iterations = 0;
  if (!(lo < hi))
    throw TpError(ErrorCode::InvalidArgument,
                  "t_remote_binary_search: invalid bracket");
  const auto star = front.tri->leaves_at_vertex(p);
  auto exclude = [&star](int t) {
    return std::find(star.begin(), star.end(), t) != star.end();
  };
  const Vec2 x = front.tri->pos[p];
  auto acceptable = [&](double top) {
    const STSimplex pole = {STPoint(x, front.tau[p]), STPoint(x, top)};
    const double s_remote = hierarchy.min_slope_intersecting(pole, exclude);
    if (!std::isfinite(s_remote)) return true;
    Front lifted(front.tri, front.tau);
    lifted.tau[p] = top;
    double gmax = 0.0;
    for (int t : star) gmax = std::max(gmax, gradient_mag(lifted, t));
    return gmax < s_remote;
  };
  if (acceptable(hi)) return hi;
  while (hi - lo > tol) {
    if (iterations) ++*iterations;
    const double mid = lo + (hi - lo) / 2.0;
    if (acceptable(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// --- Lookahead ------------------------------------------------------------

namespace {

// The progress constraint applied to every edge, not only the highest one.
// The lookahead recursion needs this stronger form: successive pitches
// maintain it, and h => h+1 monotonicity requires every edge bounded
// before a lift.
bool progress_all_edges(const TriangleShape& shape,
                        const std::array<double, 3>& tau, double slope,
                        double epsilon) {
  for (int i = 0; i < 3; ++i) {
    const int a = (i + 1) % 3;
    const int b = (i + 2) % 3;
    const double len = dist(shape.v[a], shape.v[b]);
    const double bound = (1.0 - epsilon) * slope * phi_edge(shape, i) * len;
    // The minimum-lift chain attains this bound exactly on obtuse edges, so
    // a few ulps of slack keep the boundary inside.
    if (std::abs(tau[b] - tau[a]) > bound * (1.0 + 1e-12)) return false;
  }
  return true;
}

int lowest_vertex(const std::array<double, 3>& tau) {
  int p = 0;
  for (int i = 1; i < 3; ++i)
    if (tau[i] < tau[p]) p = i;
  return p;
}

bool shape_causal(const TriangleShape& shape, const std::array<double, 3>& tau,
                  const WavespeedField& field) {
  return gradient_of(shape, tau) <
         field.min_slope_over(spacetime_triangle(shape, tau));
}

// Sup of tau'(p) keeping the triangle causal against the field, found by
// bisection: the gradient grows with the lift while the field's minimum
// slope over the facet can only fall (time monotonicity), so the causal
// range starting at tau(p) is an interval.
double causal_sup_field(const TriangleShape& shape,
                        const std::array<double, 3>& tau, int p_idx,
                        const WavespeedField& field) {
  auto causal_at = [&](double t) {
    std::array<double, 3> lifted = tau;
    lifted[p_idx] = t;
    return shape_causal(shape, lifted, field);
  };
  // Cap: above the closed-form sup at the globally largest slope no lift
  // can be causal.
  const int a = (p_idx + 1) % 3;
  const int b = (p_idx + 2) % 3;
  const double maxS = field.max_slope();
  const double g = std::abs(tau[b] - tau[a]) / dist(shape.v[a], shape.v[b]);
  if (g >= maxS) return tau[p_idx];
  const Vec2 foot =
      foot_of_perpendicular(shape.v[p_idx], shape.v[a], shape.v[b]);
  const Vec2 d = shape.v[b] - shape.v[a];
  const double s = (foot - shape.v[a]).dot(d) / d.norm2();
  const double tau_foot = tau[a] + s * (tau[b] - tau[a]);
  double hi = tau_foot +
              dist(shape.v[p_idx], foot) * std::sqrt(maxS * maxS - g * g);
  double lo = tau[p_idx];
  if (hi <= lo || causal_at(hi)) return std::max(hi, lo);
  for (int i = 0; i < 80; ++i) {
    const double mid = lo + (hi - lo) / 2.0;
    if (causal_at(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double slope_after_lift(const TriangleShape& shape,
                        const std::array<double, 3>& tau, int p_idx, double t,
                        const WavespeedField& field) {
  std::array<double, 3> lifted = tau;
  lifted[p_idx] = t;
  return field.min_slope_over(spacetime_triangle(shape, lifted));
}

double future_slope(const TriangleShape& shape,
                    const std::array<double, 3>& tau, int h,
                    const WavespeedField& field, const LookaheadParams& params);

bool is_h_progressive_fwd(const TriangleShape& shape,
                          const std::array<double, 3>& tau, int h,
                          const WavespeedField& field,
                          const LookaheadParams& params);

ProgressResult maximize_progress_impl(const TriangleShape& shape,
                                      const std::array<double, 3>& tau,
                                      int p_idx, int h,
                                      const WavespeedField& field,
                                      const LookaheadParams& params,
                                      bool tighten) {
  const double eps = params.constraints.epsilon;
  double est = params.min_slope;
  ProgressResult result;
  for (int iter = 0; iter < params.iteration_cap; ++iter) {
    const double t_star =
        std::min(causal_sup_field(shape, tau, p_idx, field),
                 progress_sup_shape(shape, tau, p_idx, est, eps));
    result.t_star = t_star;
    std::array<double, 3> star = tau;
    star[p_idx] = t_star;
    const double s_future = future_slope(shape, star, h - 1, field, params);
    const double t2 =
        std::min(causal_sup_field(shape, tau, p_idx, field),
                 progress_sup_shape(shape, tau, p_idx, s_future, eps));
    const double realized = slope_after_lift(shape, tau, p_idx, t2, field);
    if (realized > est) {
      est = realized;
      continue;
    }
    break;
  }
  if (result.t_star == 0.0 && tau[p_idx] > 0.0) result.t_star = tau[p_idx];
  if (!tighten) return result;
  // The estimate iteration can overshoot the decision procedure on edges
  // the intermediate lifts never touch; clamp by bisecting against it.
  auto progressive_at = [&](double t) {
    std::array<double, 3> lifted = tau;
    lifted[p_idx] = t;
    return is_h_progressive_fwd(shape, lifted, h, field, params);
  };
  if (progressive_at(result.t_star)) return result;
  double lo = tau[p_idx];
  double hi = result.t_star;
  for (int i = 0; i < 60; ++i) {
    const double mid = lo + (hi - lo) / 2.0;
    if (progressive_at(mid))
      lo = mid;
    else
      hi = mid;
  }
  result.t_star = lo;
  return result;
}

double future_slope(const TriangleShape& shape,
                    const std::array<double, 3>& tau, int h,
                    const WavespeedField& field,
                    const LookaheadParams& params) {
  if (h <= 0) return params.min_slope;
  const double tmin = *std::min_element(tau.begin(), tau.end());
  double est = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (tau[i] != tmin) continue;
    const ProgressResult r =
        maximize_progress_impl(shape, tau, i, h, field, params, false);
    est = std::min(est, slope_after_lift(shape, tau, i, r.t_star, field));
  }
  return est;
}

bool is_h_progressive_fwd(const TriangleShape& shape,
                          const std::array<double, 3>& tau, int h,
                          const WavespeedField& field,
                          const LookaheadParams& params) {
  return is_h_progressive_shape(shape, tau, h, field, params);
}

}  // namespace

bool is_h_progressive_shape(const TriangleShape& shape,
                            const std::array<double, 3>& tau, int h,
                            const WavespeedField& field,
                            const LookaheadParams& params) {
  const double eps = params.constraints.epsilon;
  if (!shape_causal(shape, tau, field)) return false;
  if (h <= 0) return progress_all_edges(shape, tau, params.min_slope, eps);
  const int p = lowest_vertex(tau);
  const double min_t = params.constraints.epsilon_hat() * params.min_slope *
                       shape.altitude(p);
  std::array<double, 3> lifted = tau;
  lifted[p] += min_t;
  const double s_next =
      field.min_slope_over(spacetime_triangle(shape, lifted));
  if (!progress_all_edges(shape, tau, s_next, eps)) return false;
  return is_h_progressive_shape(shape, lifted, h - 1, field, params);
}

bool is_h_progressive(const Front& front, int tri, int h,
                      const WavespeedField& field,
                      const LookaheadParams& params) {
  const auto& node = front.tri->tris[tri];
  return is_h_progressive_shape(
      front.tri->shape(tri),
      {front.tau[node.v[0]], front.tau[node.v[1]], front.tau[node.v[2]]}, h,
      field, params);
}

bool is_adaptively_h_progressive_shape(const TriangleShape& shape,
                                       const std::array<double, 3>& tau, int h,
                                       const WavespeedField& field,
                                       const LookaheadParams& params) {
  if (!shape_causal(shape, tau, field)) return false;
  if (h <= 0)
    return satisfies_adaptive_shape(shape, tau, params.min_slope,
                                    params.constraints);
  const int p = lowest_vertex(tau);
  const double min_t = params.constraints.epsilon_hat() * params.min_slope *
                       shape.altitude(p);
  std::array<double, 3> lifted = tau;
  lifted[p] += min_t;
  const double s_next =
      field.min_slope_over(spacetime_triangle(shape, lifted));
  if (!satisfies_adaptive_shape(shape, tau, s_next, params.constraints))
    return false;
  return is_adaptively_h_progressive_shape(shape, lifted, h - 1, field, params);
}

bool is_hl_progressive_shape(const TriangleShape& shape,
                             const std::array<double, 3>& tau, int h, int l,
                             const WavespeedField& field,
                             const LookaheadParams& params) {
  if (l <= 0)
    return is_adaptively_h_progressive_shape(shape, tau, h, field, params);
  if (!is_h_progressive_shape(shape, tau, h, field, params)) return false;
  const Vec2 d = midpoint(shape.v[1], shape.v[2]);
  const double td = (tau[1] + tau[2]) / 2.0;
  const TriangleShape c1{d, shape.v[2], shape.v[0]};
  const TriangleShape c2{d, shape.v[0], shape.v[1]};
  return is_hl_progressive_shape(c1, {td, tau[2], tau[0]}, h, l - 1, field,
                                 params) &&
         is_hl_progressive_shape(c2, {td, tau[0], tau[1]}, h, l - 1, field,
                                 params);
}

bool is_hl_progressive(const Front& front, int tri, int h, int l,
                       const WavespeedField& field,
                       const LookaheadParams& params) {
  const auto& node = front.tri->tris[tri];
  return is_hl_progressive_shape(
      front.tri->shape(tri),
      {front.tau[node.v[0]], front.tau[node.v[1]], front.tau[node.v[2]]}, h, l,
      field, params);
}

ProgressResult maximize_progress_shape(const TriangleShape& shape,
                                       const std::array<double, 3>& tau,
                                       int p_idx, int h,
                                       const WavespeedField& field,
                                       const LookaheadParams& params) {
  if (h <= 0)
    throw TpError(ErrorCode::InvalidArgument, "maximize_progress: h > 0");
  return maximize_progress_impl(shape, tau, p_idx, h, field, params, true);
}

ProgressResult maximize_progress(const Front& front, int p, int tri, int h,
                                 const WavespeedField& field,
                                 const LookaheadParams& params) {
  const auto& node = front.tri->tris[tri];
  int idx = -1;
  for (int i = 0; i < 3; ++i)
    if (node.v[i] == p) idx = i;
  if (idx < 0)
    throw TpError(ErrorCode::InvalidArgument, "maximize_progress: p not in tri");
  return maximize_progress_shape(
      front.tri->shape(tri),
      {front.tau[node.v[0]], front.tau[node.v[1]], front.tau[node.v[2]]}, idx,
      h, field, params);
}

MachDecision mach_refine_decision(const Front& front, int tri,
                                  const WavespeedField& field) {
  const STSimplex facet = front.facet(tri);
  const double ratio =
      field.max_slope_over(facet) / field.min_slope_over(facet);
  if (ratio > 4.0) return MachDecision::Refine;
  if (ratio < 2.0) return MachDecision::Coarsenable;
  return MachDecision::Keep;
}

}  // namespace tentpitcher
