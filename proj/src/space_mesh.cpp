#include "tentpitcher/space_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tentpitcher {

double SpaceMesh::diameter() const {
  double d = 0.0;
  for (size_t i = 0; i < vertices.size(); ++i)
    for (size_t j = i + 1; j < vertices.size(); ++j)
      d = std::max(d, dist(vertices[i], vertices[j]));
  return d;
}

void SpaceMesh::assign_default_apexes() {
  if (dim != 2) return;
  apex.assign(cells.size(), 0);
  for (size_t c = 0; c < cells.size(); ++c) {
    const TriangleShape t = triangle(c);
    int best = 0;
    for (int k = 1; k < 3; ++k) {
      if (t.angle(k) > t.angle(best) + 1e-12 ||
          (std::abs(t.angle(k) - t.angle(best)) <= 1e-12 &&
           cells[c][k] < cells[c][best]))
        best = k;
    }
    apex[c] = best;
  }
}

namespace {

bool point_strictly_inside_triangle(const Vec2& p, const TriangleShape& t,
                                    double tol) {
  const double s0 = signed_area2(t.v[0], t.v[1], p);
  const double s1 = signed_area2(t.v[1], t.v[2], p);
  const double s2 = signed_area2(t.v[2], t.v[0], p);
  const double orient = signed_area2(t.v[0], t.v[1], t.v[2]) > 0 ? 1.0 : -1.0;
  return orient * s0 > tol && orient * s1 > tol && orient * s2 > tol;
}

// Proper crossing: the open segments intersect.
bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d,
                    double tol) {
  const double d1 = signed_area2(c, d, a);
  const double d2 = signed_area2(c, d, b);
  const double d3 = signed_area2(a, b, c);
  const double d4 = signed_area2(a, b, d);
  return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
         ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
}

int shared_vertex_count(const std::array<int, 3>& a, const std::array<int, 3>& b,
                        int n) {
  int count = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a[i] == b[j]) ++count;
  return count;
}

}  // namespace

ValidationReport validate_complex(const SpaceMesh& mesh) {
  ValidationReport report;
  const int n = mesh.cell_size();
  const double scale = std::max(mesh.diameter(), 1e-300);
  const double tol = 1e-12 * scale * scale;

  std::vector<bool> used(mesh.vertices.size(), false);
  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cell = mesh.cells[c];
    bool repeated = false;
    for (int i = 0; i < n; ++i) {
      if (cell[i] < 0 || cell[i] >= static_cast<int>(mesh.vertices.size())) {
        report.add("cell " + std::to_string(c) + ": vertex index out of range");
        repeated = true;
        break;
      }
      used[cell[i]] = true;
      for (int j = i + 1; j < n; ++j)
        if (cell[i] == cell[j]) repeated = true;
    }
    if (repeated) {
      report.add("cell " + std::to_string(c) + ": degenerate (repeated vertex)");
      continue;
    }
    if (mesh.dim == 1) {
      if (dist(mesh.vertices[cell[0]], mesh.vertices[cell[1]]) <= 1e-12 * scale)
        report.add("cell " + std::to_string(c) + ": degenerate (zero length)");
    } else {
      if (mesh.triangle(c).degenerate())
        report.add("cell " + std::to_string(c) + ": degenerate (zero area)");
      if (mesh.apex.size() == mesh.cells.size() &&
          (mesh.apex[c] < 0 || mesh.apex[c] > 2))
        report.add("cell " + std::to_string(c) + ": apex index out of range");
    }
  }
  for (size_t v = 0; v < mesh.vertices.size(); ++v)
    if (!used[v]) report.add("vertex " + std::to_string(v) + ": dangling");

  // Pairwise intersections must be shared faces.
  for (size_t a = 0; a < mesh.cells.size(); ++a) {
    for (size_t b = a + 1; b < mesh.cells.size(); ++b) {
      const int shared = shared_vertex_count(mesh.cells[a], mesh.cells[b], n);
      if (shared == n) {
        report.add("cells " + std::to_string(a) + "," + std::to_string(b) +
                   ": identical vertex sets");
        continue;
      }
      if (mesh.dim == 1) {
        const Vec2& a0 = mesh.vertices[mesh.cells[a][0]];
        const Vec2& a1 = mesh.vertices[mesh.cells[a][1]];
        for (int k = 0; k < 2; ++k) {
          const int vb = mesh.cells[b][k];
          if (vb == mesh.cells[a][0] || vb == mesh.cells[a][1]) continue;
          if (dist_point_segment(mesh.vertices[vb], a0, a1) <= 1e-12 * scale &&
              dist(mesh.vertices[vb], a0) > 1e-12 * scale &&
              dist(mesh.vertices[vb], a1) > 1e-12 * scale)
            report.add("cells " + std::to_string(a) + "," + std::to_string(b) +
                       ": segment overlap");
        }
        continue;
      }
      const TriangleShape ta = mesh.triangle(a);
      const TriangleShape tb = mesh.triangle(b);
      bool bad = false;
      for (int i = 0; i < 3 && !bad; ++i) {
        if (point_strictly_inside_triangle(tb.v[i], ta, tol)) bad = true;
        if (point_strictly_inside_triangle(ta.v[i], tb, tol)) bad = true;
      }
      for (int i = 0; i < 3 && !bad; ++i) {
        for (int j = 0; j < 3 && !bad; ++j) {
          const int ai0 = mesh.cells[a][i], ai1 = mesh.cells[a][(i + 1) % 3];
          const int bj0 = mesh.cells[b][j], bj1 = mesh.cells[b][(j + 1) % 3];
          if (ai0 == bj0 || ai0 == bj1 || ai1 == bj0 || ai1 == bj1) continue;
          if (segments_cross(mesh.vertices[ai0], mesh.vertices[ai1],
                             mesh.vertices[bj0], mesh.vertices[bj1], tol))
            bad = true;
        }
      }
      if (bad)
        report.add("cells " + std::to_string(a) + "," + std::to_string(b) +
                   ": non-face intersection");
    }
  }
  return report;
}

double width_at_vertex(const SpaceMesh& mesh, int p) {
  double w = std::numeric_limits<double>::infinity();
  bool found = false;
  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    const auto& cell = mesh.cells[c];
    for (int i = 0; i < mesh.cell_size(); ++i) {
      if (cell[i] != p) continue;
      found = true;
      if (mesh.dim == 1) {
        w = std::min(w, dist(mesh.vertices[cell[0]], mesh.vertices[cell[1]]));
      } else {
        w = std::min(w, dist_point_line(mesh.vertices[p],
                                        mesh.vertices[cell[(i + 1) % 3]],
                                        mesh.vertices[cell[(i + 2) % 3]]));
      }
    }
  }
  if (!found)
    throw TpError(ErrorCode::IsolatedVertex,
                  "width_at_vertex: vertex " + std::to_string(p) +
                      " has no incident cell");
  return w;
}

}  // namespace tentpitcher
