#include "tentpitcher/patch.hpp"

#include <algorithm>
#include <cmath>

namespace tentpitcher {

int SpacetimeMesh::add_vertex(int space_id, const STPoint& p) {
  const auto key = std::make_pair(space_id, p.t);
  auto it = lookup_.find(key);
  if (it != lookup_.end()) return it->second;
  verts.push_back(p);
  vert_space_id.push_back(space_id);
  const int id = static_cast<int>(verts.size()) - 1;
  lookup_[key] = id;
  return id;
}

int SpacetimeMesh::append_patch(const Patch& patch, long step) {
  const int pid = patch_count++;
  for (const auto& pe : patch.elements) {
    STElement el;
    el.patch_id = pid;
    el.step = step;
    el.labels = pe.labels;
    for (size_t i = 0; i < pe.verts.size(); ++i)
      el.v.push_back(add_vertex(pe.space_vids[i], pe.verts[i]));
    elements.push_back(std::move(el));
  }
  return pid;
}

Patch triangulate_tent(const Front& before, int p, double t_top) {
  Patch patch;
  patch.vertex = p;
  patch.t_bottom = before.tau[p];
  patch.t_top = t_top;
  const auto& tri = *before.tri;
  for (int t : tri.leaves_at_vertex(p)) {
    PatchElement el;
    el.front_tri = t;
    el.verts.push_back({tri.pos[p], before.tau[p]});
    el.space_vids.push_back(p);
    el.verts.push_back({tri.pos[p], t_top});
    el.space_vids.push_back(p);
    el.labels = {FacetLabel::Outflow, FacetLabel::Inflow};
    for (int i = 0; i < tri.cell_size(); ++i) {
      const int q = tri.tris[t].v[i];
      if (q == p) continue;
      el.verts.push_back({tri.pos[q], before.tau[q]});
      el.space_vids.push_back(q);
      el.labels.push_back(FacetLabel::Implicit);
    }
    patch.elements.push_back(std::move(el));
  }
  return patch;
}

Patch flip_patch(const Front& front, int d0, int d1, int oa, int ob) {
  Patch patch;
  patch.vertex = -1;
  const auto& tri = *front.tri;
  PatchElement el;
  el.front_tri = -1;
  for (int v : {d0, oa, d1, ob}) {
    el.verts.push_back({tri.pos[v], front.tau[v]});
    el.space_vids.push_back(v);
  }
  // Facet opposite d0 = {oa, d1, ob} (new front), opposite d1 = {d0, oa, ob}
  // (new front); the facets opposite oa and ob are the two old triangles.
  el.labels = {FacetLabel::Outflow, FacetLabel::Inflow, FacetLabel::Outflow,
               FacetLabel::Inflow};
  double lo = front.tau[d0], hi = front.tau[d0];
  for (int v : {d1, oa, ob}) {
    lo = std::min(lo, front.tau[v]);
    hi = std::max(hi, front.tau[v]);
  }
  patch.t_bottom = lo;
  patch.t_top = hi;
  patch.elements.push_back(std::move(el));
  return patch;
}

namespace {

// Vertical extent of the element above the spatial point x.
double vertical_extent(const std::vector<STPoint>& el, const Vec2& x) {
  const int n = static_cast<int>(el.size());
  if (n == 3) {
    // Triangle in (x, t): clip the vertical line against the edges.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    bool any = false;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const double xa = el[i].x.x, xb = el[j].x.x;
        if (std::min(xa, xb) > x.x || std::max(xa, xb) < x.x) continue;
        double t;
        if (xa == xb) {
          lo = std::min({lo, el[i].t, el[j].t});
          hi = std::max({hi, el[i].t, el[j].t});
          any = true;
          continue;
        }
        t = el[i].t + (el[j].t - el[i].t) * (x.x - xa) / (xb - xa);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
        any = true;
      }
    }
    return any ? std::max(0.0, hi - lo) : 0.0;
  }
  // Tetrahedron: intersect the vertical line with the four facet
  // half-spaces, each oriented by the opposite vertex.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (int skip = 0; skip < 4; ++skip) {
    std::array<const STPoint*, 3> f{};
    int k = 0;
    for (int i = 0; i < 4; ++i)
      if (i != skip) f[k++] = &el[i];
    // Plane normal in (x, y, t).
    const double ux = f[1]->x.x - f[0]->x.x, uy = f[1]->x.y - f[0]->x.y,
                 ut = f[1]->t - f[0]->t;
    const double wx = f[2]->x.x - f[0]->x.x, wy = f[2]->x.y - f[0]->x.y,
                 wt = f[2]->t - f[0]->t;
    double nx = uy * wt - ut * wy;
    double ny = ut * wx - ux * wt;
    double nt = ux * wy - uy * wx;
    double c = nx * f[0]->x.x + ny * f[0]->x.y + nt * f[0]->t;
    // Inside: opposite vertex satisfies n . v <= c after orienting.
    const double side =
        nx * el[skip].x.x + ny * el[skip].x.y + nt * el[skip].t - c;
    if (side > 0) {
      nx = -nx;
      ny = -ny;
      nt = -nt;
      c = -c;
    }
    const double base = nx * x.x + ny * x.y;
    if (nt == 0.0) {
      if (base > c) return 0.0;
      continue;
    }
    const double bound = (c - base) / nt;
    if (nt > 0.0)
      hi = std::min(hi, bound);
    else
      lo = std::max(lo, bound);
  }
  return std::max(0.0, hi - lo);
}

}  // namespace

double temporal_aspect_ratio(const std::vector<STPoint>& element) {
  double tmin = element[0].t, tmax = element[0].t;
  for (const auto& p : element) {
    tmin = std::min(tmin, p.t);
    tmax = std::max(tmax, p.t);
  }
  const double duration = tmax - tmin;
  if (duration <= 0.0)
    throw TpError(ErrorCode::DegenerateSimplex,
                  "temporal_aspect_ratio: zero duration");
  std::vector<Vec2> candidates;
  for (const auto& p : element) candidates.push_back(p.x);
  const int n = static_cast<int>(element.size());
  if (n == 4) {
    // Crossings of projected edges can carry the maximum vertical chord.
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = k + 1; l < n; ++l) {
            if (k == i && l == j) continue;
            const Vec2 a = element[i].x, b = element[j].x;
            const Vec2 c = element[k].x, d = element[l].x;
            const double den = (b - a).cross(d - c);
            if (den == 0.0) continue;
            const double u = (c - a).cross(d - c) / den;
            const double v = (c - a).cross(b - a) / den;
            if (u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)
              candidates.push_back(a + (b - a) * u);
          }
  }
  double height = 0.0;
  for (const auto& x : candidates)
    height = std::max(height, vertical_extent(element, x));
  return height / duration;
}

namespace {

struct ElemGeo {
  std::vector<STPoint> pts;
  std::vector<int> vids;
  double lo[3], hi[3];
};

double coord(const STPoint& p, int axis) {
  return axis == 0 ? p.x.x : (axis == 1 ? p.x.y : p.t);
}

ElemGeo make_geo(const SpacetimeMesh& mesh, const STElement& el) {
  ElemGeo g;
  for (int ax = 0; ax < 3; ++ax) {
    g.lo[ax] = std::numeric_limits<double>::infinity();
    g.hi[ax] = -g.lo[ax];
  }
  for (int v : el.v) {
    g.pts.push_back(mesh.verts[v]);
    g.vids.push_back(v);
    for (int ax = 0; ax < 3; ++ax) {
      g.lo[ax] = std::min(g.lo[ax], coord(mesh.verts[v], ax));
      g.hi[ax] = std::max(g.hi[ax], coord(mesh.verts[v], ax));
    }
  }
  return g;
}

struct Vec3 {
  double x, y, z;
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 scaled(double s) const { return {x * s, y * s, z * s}; }
};

Vec3 to3(const STPoint& p) { return {p.x.x, p.x.y, p.t}; }

// Signed "inside" margin of a point in a full-dimensional simplex: the
// minimum distance to the facet planes, positive inside.
double inside_margin(const ElemGeo& g, const Vec3& p, int dim) {
  double margin = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(g.pts.size());
  if (dim == 1) {
    // Triangle in (x, t); use 2D edge normals.
    for (int skip = 0; skip < n; ++skip) {
      int ids[2], k = 0;
      for (int i = 0; i < n; ++i)
        if (i != skip) ids[k++] = i;
      const Vec2 a{g.pts[ids[0]].x.x, g.pts[ids[0]].t};
      const Vec2 b{g.pts[ids[1]].x.x, g.pts[ids[1]].t};
      const Vec2 q{p.x, p.z};
      const Vec2 o{g.pts[skip].x.x, g.pts[skip].t};
      Vec2 nrm{-(b - a).y, (b - a).x};
      const double len = nrm.norm();
      if (len == 0.0) return -std::numeric_limits<double>::infinity();
      nrm = nrm / len;
      double side = nrm.dot(o - a);
      double d = nrm.dot(q - a);
      if (side < 0) {
        side = -side;
        d = -d;
      }
      margin = std::min(margin, d);
    }
    return margin;
  }
  for (int skip = 0; skip < n; ++skip) {
    Vec3 f[3];
    int k = 0;
    for (int i = 0; i < n; ++i)
      if (i != skip) f[k++] = to3(g.pts[i]);
    Vec3 nrm = (f[1] - f[0]).cross(f[2] - f[0]);
    const double len = nrm.norm();
    if (len == 0.0) return -std::numeric_limits<double>::infinity();
    nrm = nrm.scaled(1.0 / len);
    double side = nrm.dot(to3(g.pts[skip]) - f[0]);
    double d = nrm.dot(p - f[0]);
    if (side < 0) {
      side = -side;
      d = -d;
    }
    margin = std::min(margin, d);
  }
  return margin;
}

// Intersection point of segment ab with the (closed) triangle cde in 3D,
// when it exists and pierces the plane transversally.
bool segment_triangle_hit(const Vec3& a, const Vec3& b, const Vec3& c,
                          const Vec3& d, const Vec3& e, double tol, Vec3& out) {
  const Vec3 nrm = (d - c).cross(e - c);
  const double denom = nrm.dot(b - a);
  if (std::abs(denom) <= tol * nrm.norm()) return false;
  const double u = nrm.dot(c - a) / denom;
  if (u < -1e-12 || u > 1.0 + 1e-12) return false;
  const Vec3 p = {a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u,
                  a.z + (b.z - a.z) * u};
  // Barycentric inside test in the triangle's plane.
  const Vec3 v0 = d - c, v1 = e - c, v2 = p - c;
  const double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
  const double d20 = v2.dot(v0), d21 = v2.dot(v1);
  const double den = d00 * d11 - d01 * d01;
  if (den == 0.0) return false;
  const double bv = (d11 * d20 - d01 * d21) / den;
  const double bw = (d00 * d21 - d01 * d20) / den;
  if (bv < -1e-9 || bw < -1e-9 || bv + bw > 1.0 + 1e-9) return false;
  out = p;
  return true;
}

bool segment_segment_hit_2d(const Vec2& a, const Vec2& b, const Vec2& c,
                            const Vec2& d, Vec2& out) {
  const double den = (b - a).cross(d - c);
  if (den == 0.0) return false;
  const double u = (c - a).cross(d - c) / den;
  const double v = (c - a).cross(b - a) / den;
  if (u < -1e-12 || u > 1.0 + 1e-12 || v < -1e-12 || v > 1.0 + 1e-12)
    return false;
  out = a + (b - a) * u;
  return true;
}

int affine_rank(const std::vector<Vec3>& pts, double tol, Vec3 basis[3]) {
  int rank = 0;
  for (size_t i = 1; i < pts.size(); ++i) {
    Vec3 v = pts[i] - pts[0];
    for (int k = 0; k < rank; ++k) {
      const double proj = v.dot(basis[k]);
      v = v - basis[k].scaled(proj);
    }
    const double len = v.norm();
    if (len > tol) {
      basis[rank] = v.scaled(1.0 / len);
      ++rank;
      if (rank == 3) break;
    }
  }
  return rank;
}

bool same_point(const Vec3& a, const Vec3& b, double tol) {
  return (a - b).norm() <= tol;
}

// Does the candidate point set match (as a set) one of the element's faces
// of the given dimension?
bool matches_face(const ElemGeo& g, const std::vector<Vec3>& hull, int face_dim,
                  double tol) {
  const int n = static_cast<int>(g.pts.size());
  std::vector<int> idx(face_dim + 1);
  // Enumerate faces as vertex subsets of size face_dim + 1.
  std::vector<std::vector<int>> subsets;
  if (face_dim == 0)
    for (int i = 0; i < n; ++i) subsets.push_back({i});
  if (face_dim == 1)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) subsets.push_back({i, j});
  if (face_dim == 2)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) subsets.push_back({i, j, k});
  for (const auto& face : subsets) {
    if (face.size() != hull.size()) continue;
    // Every hull corner must match a distinct face vertex.
    std::vector<bool> used(face.size(), false);
    bool all = true;
    for (const auto& h : hull) {
      bool found = false;
      for (size_t k = 0; k < face.size(); ++k) {
        if (!used[k] && same_point(h, to3(g.pts[face[k]]), tol)) {
          used[k] = true;
          found = true;
          break;
        }
      }
      if (!found) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

// Extreme points of a rank-2 candidate set (convex polygon corners).
std::vector<Vec3> polygon_hull(const std::vector<Vec3>& pts, const Vec3 basis[3],
                               double tol) {
  std::vector<Vec2> flat;
  for (const auto& p : pts)
    flat.push_back({(p - pts[0]).dot(basis[0]), (p - pts[0]).dot(basis[1])});
  std::vector<int> order(flat.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return flat[a].x < flat[b].x || (flat[a].x == flat[b].x && flat[a].y < flat[b].y);
  });
  std::vector<int> hull;
  auto build = [&](bool upper) {
    std::vector<int> chain;
    for (size_t ii = 0; ii < order.size(); ++ii) {
      const int i = order[upper ? order.size() - 1 - ii : ii];
      while (chain.size() >= 2) {
        const Vec2 a = flat[chain[chain.size() - 2]];
        const Vec2 b = flat[chain[chain.size() - 1]];
        if ((b - a).cross(flat[i] - a) <= tol * (b - a).norm()) {
          chain.pop_back();
        } else {
          break;
        }
      }
      chain.push_back(i);
    }
    for (size_t k = 0; k + 1 < chain.size(); ++k) hull.push_back(chain[k]);
  };
  build(false);
  build(true);
  std::vector<Vec3> out;
  for (int i : hull) out.push_back(pts[i]);
  return out;
}

bool pair_ok(const SpacetimeMesh& mesh, const ElemGeo& A, const ElemGeo& B,
             double scale, std::string& why) {
  const double tol = 1e-9 * scale;
  for (int ax = 0; ax < (mesh.dim == 1 ? 1 : 2); ++ax)
    if (A.lo[ax] > B.hi[ax] + tol || B.lo[ax] > A.hi[ax] + tol) return true;
  if (A.lo[2] > B.hi[2] + tol || B.lo[2] > A.hi[2] + tol) return true;

  std::vector<Vec3> cand;
  for (const auto& p : A.pts)
    if (inside_margin(B, to3(p), mesh.dim) >= -tol) cand.push_back(to3(p));
  for (const auto& p : B.pts)
    if (inside_margin(A, to3(p), mesh.dim) >= -tol) cand.push_back(to3(p));

  const int n = static_cast<int>(A.pts.size());
  if (mesh.dim == 2) {
    for (int dir = 0; dir < 2; ++dir) {
      const ElemGeo& E = dir ? B : A;
      const ElemGeo& F = dir ? A : B;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          for (int s = 0; s < n; ++s) {
            Vec3 f[3];
            int k = 0;
            for (int m = 0; m < n; ++m)
              if (m != s) f[k++] = to3(F.pts[m]);
            Vec3 hit;
            if (segment_triangle_hit(to3(E.pts[i]), to3(E.pts[j]), f[0], f[1],
                                     f[2], 1e-14, hit) &&
                inside_margin(E, hit, 2) >= -tol &&
                inside_margin(F, hit, 2) >= -tol)
              cand.push_back(hit);
          }
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = k + 1; l < n; ++l) {
            const Vec2 a{A.pts[i].x.x, A.pts[i].t};
            const Vec2 b{A.pts[j].x.x, A.pts[j].t};
            const Vec2 c{B.pts[k].x.x, B.pts[k].t};
            const Vec2 d{B.pts[l].x.x, B.pts[l].t};
            Vec2 hit;
            if (segment_segment_hit_2d(a, b, c, d, hit))
              cand.push_back({hit.x, 0.0, hit.y});
          }
  }

  if (cand.empty()) return true;
  std::vector<Vec3> uniq;
  for (const auto& p : cand) {
    bool dup = false;
    for (const auto& q : uniq)
      if (same_point(p, q, tol)) dup = true;
    if (!dup) uniq.push_back(p);
  }

  const int ambient = (mesh.dim == 1) ? 2 : 3;
  Vec3 basis[3];
  const int rank = affine_rank(uniq, tol, basis);

  if (rank >= ambient) {
    Vec3 centroid{0, 0, 0};
    for (const auto& p : uniq) {
      centroid.x += p.x;
      centroid.y += p.y;
      centroid.z += p.z;
    }
    centroid = centroid.scaled(1.0 / static_cast<double>(uniq.size()));
    if (inside_margin(A, centroid, mesh.dim) > tol &&
        inside_margin(B, centroid, mesh.dim) > tol) {
      why = "interior overlap";
      return false;
    }
    return true;  // numerically flat contact
  }

  if (rank == 0) {
    for (const auto& g : {&A, &B})
      for (const auto& p : g->pts)
        if (same_point(uniq[0], to3(p), tol)) return true;
    why = "point contact not a vertex";
    return false;
  }

  if (rank == 1) {
    double smin = 0.0, smax = 0.0;
    Vec3 pmin = uniq[0], pmax = uniq[0];
    for (const auto& p : uniq) {
      const double s = (p - uniq[0]).dot(basis[0]);
      if (s < smin) {
        smin = s;
        pmin = p;
      }
      if (s > smax) {
        smax = s;
        pmax = p;
      }
    }
    const std::vector<Vec3> seg = {pmin, pmax};
    if (matches_face(A, seg, 1, tol) || matches_face(B, seg, 1, tol))
      return true;
    why = "segment contact not an edge of either";
    return false;
  }

  // rank == 2 in 3D ambient: a planar polygon.
  const std::vector<Vec3> hull = polygon_hull(uniq, basis, tol);
  if (matches_face(A, hull, 2, tol) || matches_face(B, hull, 2, tol))
    return true;
  why = "planar contact not a facet of either";
  return false;
}

}  // namespace

ValidationReport verify_weak_complex(const SpacetimeMesh& mesh) {
  ValidationReport report;
  std::vector<ElemGeo> geo;
  geo.reserve(mesh.elements.size());
  double scale = 0.0;
  for (const auto& el : mesh.elements) {
    geo.push_back(make_geo(mesh, el));
    for (int ax = 0; ax < 3; ++ax)
      scale = std::max(scale, geo.back().hi[ax] - geo.back().lo[ax]);
  }
  for (const auto& v : mesh.verts) {
    scale = std::max(scale, std::abs(v.x.x));
    scale = std::max(scale, std::abs(v.x.y));
    scale = std::max(scale, std::abs(v.t));
  }
  if (scale == 0.0) scale = 1.0;

  std::vector<int> order(geo.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return geo[a].lo[2] < geo[b].lo[2]; });
  const double tol = 1e-9 * scale;
  for (size_t a = 0; a < order.size(); ++a) {
    const ElemGeo& A = geo[order[a]];
    for (size_t b = a + 1; b < order.size(); ++b) {
      const ElemGeo& B = geo[order[b]];
      if (B.lo[2] > A.hi[2] + tol) break;
      std::string why;
      if (!pair_ok(mesh, A, B, scale, why)) {
        report.add("elements " + std::to_string(order[a]) + "," +
                   std::to_string(order[b]) + ": " + why);
        if (report.issues.size() > 50) return report;
      }
    }
  }
  return report;
}

}  // namespace tentpitcher
