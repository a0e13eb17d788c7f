#pragma once

#include <map>

#include "tentpitcher/front.hpp"
#include "tentpitcher/space_mesh.hpp"

namespace tentpitcher {

enum class FacetLabel { Inflow, Outflow, Implicit };

// One spacetime element of a patch before it is committed to the mesh.
// verts has d+2 entries; labels[i] describes the facet opposite verts[i].
// front_tri is the front leaf whose pitch produced the element.
struct PatchElement {
  std::vector<STPoint> verts;
  std::vector<int> space_vids;  // spatial vertex id per vert (-1: none)
  std::vector<FacetLabel> labels;
  int front_tri = -1;
};

// The elements filling one tent (or one spacetime edge flip).
struct Patch {
  int vertex = -1;  // tentpole vertex; -1 for flip patches
  double t_bottom = 0.0;
  double t_top = 0.0;
  std::vector<PatchElement> elements;
};

struct STElement {
  std::vector<int> v;
  std::vector<FacetLabel> labels;
  int patch_id = -1;
  long step = -1;
};

// Accumulated spacetime mesh.  Vertices are deduplicated by (spatial vertex
// id, exact time) so shared faces reference identical vertex ids.
struct SpacetimeMesh {
  int dim = 2;
  std::vector<STPoint> verts;
  std::vector<int> vert_space_id;
  std::vector<STElement> elements;

  int add_vertex(int space_id, const STPoint& p);
  int append_patch(const Patch& patch, long step);  // returns patch id
  int patch_count = 0;

 private:
  std::map<std::pair<int, double>, int> lookup_;
};

// One element per facet of the new star: the convex hull of the facet and
// the tentpole bottom.  The facet on the new front is the outflow facet,
// the old-front facet the inflow facet, faces containing the tentpole are
// implicit.
Patch triangulate_tent(const Front& before, int p, double t_top);

// Single-tetrahedron patch realizing a spacetime edge flip of diagonal
// (d0, d1) against opposite vertices (oa, ob); inflow facets are the two
// old triangles, outflow the two new ones.
Patch flip_patch(const Front& front, int d0, int d1, int oa, int ob);

// Ratio of the longest vertical segment inside the element to its time
// extent.  Throws DegenerateSimplex on zero duration.
double temporal_aspect_ratio(const std::vector<STPoint>& element);

// Every pairwise intersection of elements must be a face of at least one of
// the two; facet containment induced by refinement is acceptable.
ValidationReport verify_weak_complex(const SpacetimeMesh& mesh);

}  // namespace tentpitcher
