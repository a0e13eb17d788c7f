#pragma once

#include <functional>

#include "tentpitcher/constraints.hpp"

namespace tentpitcher {

// Future cone of influence of a front facet: every point of the facet emits
// a cone of the facet's (minimum) slope; the union is a convex region whose
// lower boundary is entry_time.
struct FacetCone {
  STSimplex facet;
  double slope = 1.0;

  // Time at which the vertical line at x enters the cone.
  double entry_time(const Vec2& x) const;
};

// Conservative bound: a box apex region with a lower-bound slope.  Contains
// every facet cone whose facet fits in the box with slope >= this slope.
struct BoxCone {
  Vec2 xlo, xhi;
  double tlo = 0.0;
  double slope = 1.0;

  double entry_time(const Vec2& x) const;
  static BoxCone of_facet(const FacetCone& fc);
  static BoxCone merge(const BoxCone& a, const BoxCone& b);
  bool contains(const BoxCone& other) const;
};

// Signed clearance of a spacetime simplex below a cone: min over the simplex
// of entry_time(x) - t.  Negative when the simplex pokes into the cone.
double cone_clearance(const std::function<double(const Vec2&)>& entry,
                      const STSimplex& s);

// Interior intersection: clearance dips below -tol.
bool cone_intersects(const FacetCone& cone, const STSimplex& s,
                     double tol = 0.0);

// Balanced binary tree of bounding cones over the front facets, built by
// recursive spatial median split.  Leaves carry exact facet cones; internal
// nodes carry conservative box cones (containment invariant).
class BoundingConeHierarchy {
 public:
  using Exclude = std::function<bool(int)>;  // by front leaf id

  void build(const Front& front, const WavespeedField& field);
  bool empty() const { return root_ < 0; }
  int leaf_count() const { return static_cast<int>(leaf_of_tri_.size()); }
  bool has_leaf(int tri_id) const { return leaf_of_tri_.count(tri_id) > 0; }

  struct RayHit {
    double t = std::numeric_limits<double>::infinity();
    int tri_id = -1;
  };

  // Earliest time the vertical ray at x enters any (non-excluded) cone.
  RayHit first_entry_vertical(const Vec2& x, const Exclude& exclude) const;

  // Minimum leaf slope among cones intersecting the simplex; +inf when the
  // simplex is below every cone.  Best-first by slope, expanding non-leaf
  // candidates into their children.
  double min_slope_intersecting(const STSimplex& s,
                                const Exclude& exclude = nullptr) const;

  // True when some (non-excluded) cone's interior dips more than tol into
  // the simplex.
  bool any_cone_intersecting(const STSimplex& s, const Exclude& exclude,
                             double tol) const;

  // Replace one leaf's facet and slope, re-tightening cones along the path
  // to the root.
  void update_leaf(int tri_id, const STSimplex& facet, double slope);

  // Containment audit: every node's box cone contains its children.
  bool audit_containment() const;

  // Exhaustive-scan oracles over the stored leaves (no tree traversal).
  RayHit scan_first_entry_vertical(const Vec2& x, const Exclude& exclude) const;
  double scan_min_slope_intersecting(const STSimplex& s,
                                     const Exclude& exclude = nullptr) const;

 private:
  struct Node {
    BoxCone box;
    int left = -1, right = -1, parent = -1;
    int tri_id = -1;  // >= 0 for leaves
    FacetCone leaf;
  };
  std::vector<Node> nodes_;
  int root_ = -1;
  std::map<int, int> leaf_of_tri_;

  int build_rec(std::vector<int>& ids, int lo, int hi,
                const std::vector<FacetCone>& cones,
                const std::vector<int>& tri_ids, int parent);
  void retighten(int node);
};

// Smallest time at which the vertical ray at front vertex p first enters a
// cone of a facet outside st(p); +inf if none.  Exact (ray shooting).
double t_remote_exact_1d(const Front& front, int p,
                         const BoundingConeHierarchy& hierarchy);

// Approximates the same by bisecting [lo, hi]: at each step the tentpole to
// the midpoint is tested against the remote cones and the prospective new
// facets' gradients against the strictest intersecting slope.
// Throws InvalidArgument when lo >= hi.
double t_remote_binary_search(const Front& front, int p,
                              const BoundingConeHierarchy& hierarchy,
                              double lo, double hi, double tol,
                              int* iterations = nullptr);

// --- Lookahead (h-progressive) machinery ---------------------------------

struct LookaheadParams {
  ConstraintParams constraints;
  double min_slope = 1.0;  // global minS
  int iteration_cap = 64;
};

// Decision procedure of the h-progressive definition, on a spacetime
// triangle given as shape (apex-first when adaptive) plus vertex times.
bool is_h_progressive_shape(const TriangleShape& shape,
                            const std::array<double, 3>& tau, int h,
                            const WavespeedField& field,
                            const LookaheadParams& params);

bool is_h_progressive(const Front& front, int tri, int h,
                      const WavespeedField& field,
                      const LookaheadParams& params);

// Same recursion with the adaptive progress constraint in place of the
// linear one.
bool is_adaptively_h_progressive_shape(const TriangleShape& shape,
                                       const std::array<double, 3>& tau, int h,
                                       const WavespeedField& field,
                                       const LookaheadParams& params);

// (h, l)-progressive: h-progressive and both bisection children are
// (h, l-1)-progressive; (h, 0) means adaptively h-progressive.
bool is_hl_progressive_shape(const TriangleShape& shape,
                             const std::array<double, 3>& tau, int h, int l,
                             const WavespeedField& field,
                             const LookaheadParams& params);

bool is_hl_progressive(const Front& front, int tri, int h, int l,
                       const WavespeedField& field,
                       const LookaheadParams& params);

struct ProgressResult {
  double t_star = 0.0;
  bool converged = true;
};

// Fixed-point iteration estimating the slope of the next step to maximize
// the height of the tentpole at local minimum p (vertex index into shape).
// On hitting the iteration cap the last (conservative) value is returned
// with converged = false.
ProgressResult maximize_progress_shape(const TriangleShape& shape,
                                       const std::array<double, 3>& tau,
                                       int p_idx, int h,
                                       const WavespeedField& field,
                                       const LookaheadParams& params);

ProgressResult maximize_progress(const Front& front, int p, int tri, int h,
                                 const WavespeedField& field,
                                 const LookaheadParams& params);

enum class MachDecision { Refine, Coarsenable, Keep };

// Wavespeed-ratio heuristic: ratio of extreme wavespeeds over the facet;
// above 4 refine, below 2 coarsenable.
MachDecision mach_refine_decision(const Front& front, int tri,
                                  const WavespeedField& field);

}  // namespace tentpitcher
