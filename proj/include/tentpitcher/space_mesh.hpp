#pragma once

#include <map>
#include <utility>
#include <vector>

#include "tentpitcher/geometry.hpp"

namespace tentpitcher {

struct ValidationIssue {
  std::string what;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  void add(std::string msg) { issues.push_back({std::move(msg)}); }
};

// Immutable input simplicial complex over a 1D or 2D space domain.
// Cells are segments (dim 1, v[2] == -1) or triangles (dim 2).  For dim 2,
// apex[c] is the index (0..2) into cells[c] of the triangle's newest vertex.
struct SpaceMesh {
  int dim = 2;
  std::vector<Vec2> vertices;            // y == 0 for dim 1
  std::vector<bool> boundary;            // per vertex
  std::vector<std::array<int, 3>> cells;
  std::vector<int> apex;                 // dim 2 only; local index 0..2

  int cell_size() const { return dim + 1; }
  TriangleShape triangle(int c) const {
    return {vertices[cells[c][0]], vertices[cells[c][1]], vertices[cells[c][2]]};
  }

  double diameter() const;               // max pairwise vertex distance

  // Picks the largest-angle vertex as the apex of every triangle, breaking
  // ties by smallest vertex id.  No-op in 1D.
  void assign_default_apexes();
};

// Checks that the mesh forms a simplicial complex: no degenerate cells, no
// dangling vertices, cells pairwise intersect in a shared face only.
ValidationReport validate_complex(const SpaceMesh& mesh);

// Minimum distance from vertex p to the affine hull of the opposite facet of
// each incident cell; throws IsolatedVertex when p has no incident cell.
double width_at_vertex(const SpaceMesh& mesh, int p);

}  // namespace tentpitcher
