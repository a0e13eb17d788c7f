#pragma once

#include <map>
#include <optional>
#include <vector>

#include "tentpitcher/space_mesh.hpp"

namespace tentpitcher {

// One node of the refinement forest.  v[0] is the apex (newest vertex); the
// base is the opposite edge (v[1], v[2]).  In 1D, v[2] == -1 and nodes are
// segments.  Leaves (alive == true) tile the current front.
struct TriNode {
  std::array<int, 3> v{-1, -1, -1};
  int parent = -1;
  std::array<int, 2> child{-1, -1};
  int level = 0;
  bool alive = false;
  bool dirty = false;        // lazy-propagation marker; set on a split parent
  bool coarsenable = false;
  bool via_flip = false;     // created by an edge flip; breaks NVB ancestry

  bool is_internal() const { return child[0] >= 0; }
};

struct AdaptOp {
  enum Kind { Bisect, Flip } kind;
  int node = -1;             // Bisect: the leaf that was split
  std::pair<int, int> edge{-1, -1};
  int new_vertex = -1;       // Bisect only
};

using AdaptLog = std::vector<AdaptOp>;

enum class FlipStatus { Ok, FlipRejected };
enum class CoarsenStatus {
  Ok,
  RejectedNotALeaf,
  RejectedCoplanarity,
  RejectedDegree,
  RejectedNoParent,
};

struct CoarsenResult {
  CoarsenStatus status = CoarsenStatus::Ok;
  std::vector<int> revived;  // node ids brought back as leaves
  std::vector<int> removed_vertices;
};

// The mutable triangulation of the advancing front: vertex store, refinement
// forest, and leaf adjacency.  Time values live alongside in the owner and
// are threaded through the few ops that need them (bisection interpolates,
// coarsening checks coplanarity).
class FrontTriangulation {
 public:
  int dim = 2;
  std::vector<Vec2> pos;
  std::vector<bool> vboundary;
  std::vector<int> vlevel;
  std::vector<bool> valive;
  std::vector<TriNode> tris;

  static FrontTriangulation from_space_mesh(const SpaceMesh& mesh);

  int cell_size() const { return dim + 1; }
  bool is_leaf(int t) const { return tris[t].alive; }
  const std::vector<int>& leaves_at_vertex(int v) const { return vtris_[v]; }
  std::vector<int> leaves() const;
  int leaf_count() const { return leaf_count_; }

  TriangleShape shape(int t) const {
    return {pos[tris[t].v[0]], pos[tris[t].v[1]], pos[tris[t].v[2]]};
  }

  // Leaves sharing the undirected edge (a, b); slots are -1 when absent.
  std::array<int, 2> edge_leaves(int a, int b) const;
  // Leaf whose closed triangle contains the point, or -1.
  int leaf_containing(const Vec2& x) const;
  // Distinct neighbor vertices of v over leaf cells.
  std::vector<int> vertex_neighbors(int v) const;
  int vertex_degree(int v) const {
    return static_cast<int>(vertex_neighbors(v).size());
  }
  int max_vertex_degree() const;

  // --- Newest vertex bisection ------------------------------------------

  // Bisects the base of leaf t, splitting t and the neighbor across the
  // base.  The neighbor is marked dirty when the shared edge is not its
  // base.  Appends interpolated time for the new vertex to tau.
  // Returns the new midpoint vertex. Throws NotALeaf when t is not a leaf.
  int bisect_triangle(int t, std::vector<double>& tau, AdaptLog& log);

  // Refinement with earnest propagation (dirty neighbors cleaned at once).
  AdaptLog refine_earnest(int t, std::vector<double>& tau);

  // Refinement with lazy propagation; dirty parents may persist.
  AdaptLog refine_lazy(int t, std::vector<double>& tau);

  // Ensures no leaf incident on vertex p has a dirty parent.
  AdaptLog cleanup_before_pitching(int p, std::vector<double>& tau);

  bool has_dirty_parent(int t) const {
    return tris[t].parent >= 0 && tris[tris[t].parent].dirty;
  }
  bool any_dirty() const;

  // --- Edge flip ----------------------------------------------------------

  // Replaces diagonal (d0, d1) of the convex quad around it by the other
  // diagonal.  Combinatorial only; the caller owns time values and decides
  // whether a spacetime patch is required.  Revives previously-dead nodes
  // when the flip restores them, so flip twice is the identity.
  FlipStatus flip_edge(int d0, int d1, AdaptLog& log);

  // --- Coarsening ---------------------------------------------------------

  // Undoes the edge bisection that inserted the apex s of leaf t: merges
  // the two leaf pairs around s and deletes s.  Requires sibling pairs to
  // be leaves and coplanar in spacetime (s on the chord of its edge within
  // coplanar_tol), and s to have degree 4 (interior) or 2 (boundary).
  // Recurses upward into parents marked coarsenable.
  CoarsenResult derefine(int t, const std::vector<double>& tau,
                         double coplanar_tol);

  // --- Homothety classes --------------------------------------------------

  // Class id (0..7) of a leaf relative to its root, counting shapes
  // equivalent up to translation and scaling.  Root itself is class 0.
  // Throws ClassUndefined when the ancestry contains a flip.
  int homothety_class(int t);

  int root_of(int t) const;

 private:
  std::vector<std::vector<int>> vtris_;  // vertex -> incident leaf ids
  std::map<std::array<int, 3>, int> by_verts_;
  std::map<std::array<int, 3>, std::vector<std::array<double, 4>>> class_catalog_;
  int leaf_count_ = 0;

  int new_vertex(const Vec2& p, bool bnd, int level);
  int new_node(int apex, int b, int c, int parent, int level, bool via_flip);
  void link_leaf(int t);
  void unlink_leaf(int t);
  void revive(int t);
  void kill(int t);
  std::array<int, 3> sorted_verts(int t) const;

  int split_leaf_on_edge(int t, int x, int y, int m, AdaptLog& log);
  void refine_and_propagate(int t, std::vector<double>& tau, AdaptLog& log,
                            bool lazy);
  void cleanup1(int parent, std::vector<double>& tau, AdaptLog& log,
                bool lazy);
  void cleanup2(int parent, std::vector<double>& tau, AdaptLog& log);
  void rebuild_nvb(int parent);
  CoarsenResult derefine_at(int s, const std::vector<double>& tau, double tol);
  std::optional<int> merge_pair(int la, int lb, int s);
  std::array<double, 4> shape_key(int t) const;
};

}  // namespace tentpitcher
