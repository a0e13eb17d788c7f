#pragma once

#include <functional>
#include <string>

#include "tentpitcher/front.hpp"

namespace tentpitcher {

// Parameters of the gradient constraints.  The legal chain is
// 0 < epsilon < phi_bar < (1+epsilon)/2 < 1 and 0 < gamma <= 1/2.
struct ConstraintParams {
  double epsilon = 0.5;
  double phi_bar = 0.625;       // band midpoint (1 + 3*epsilon)/4
  double gamma = 0.5;
  double delta_margin = 1e-9;   // sup-to-feasible back-off

  double epsilon_hat() const { return std::min(epsilon, 1.0 - epsilon); }

  static ConstraintParams with_epsilon(double e) {
    ConstraintParams p;
    p.epsilon = e;
    p.phi_bar = (1.0 + 3.0 * e) / 4.0;
    return p;
  }

  void validate() const;
};

enum class BindingKind {
  Causality,
  ProgressEdge,
  AdaptiveCase,
  TargetTime,
  Coplanarity,
  RemoteCone,
  None,
};

// An upper bound on the new time of a pitched vertex, with what produced it.
struct HeightBound {
  double sup = std::numeric_limits<double>::infinity();
  BindingKind kind = BindingKind::None;
  int vertex_a = -1;  // ProgressEdge: far end; AdaptiveCase: stored apex
  int term = -1;      // AdaptiveCase: constraint index 0..3

  std::string label() const;
};

inline HeightBound min_bound(const HeightBound& x, const HeightBound& y) {
  return x.sup <= y.sup ? x : y;
}

// Strict-inequality suprema are not feasible; back off by the relative
// margin delta: tau_p + (1 - delta) * (sup - tau_p).
inline double feasible_height(double tau_p, double sup, double delta) {
  return tau_p + (1.0 - delta) * (sup - tau_p);
}

// 1D causality: sup tau'(p) = min over incident segments pq of
// tau(q) + |pq| * slope(segment).
HeightBound causal_sup_1d(const Front& front, int p,
                          const std::function<double(int)>& segment_slope);

// 2D causality for one incident triangle: with pbar the foot of the
// perpendicular from p onto line qr and g the gradient of tau along qr,
// sup tau'(p) = tau(pbar) + |p pbar| * sqrt(S^2 - g^2).
// Throws CausalityAlreadyViolated when g >= S.
HeightBound causal_sup_2d(const Front& front, int p, int tri, double slope);

// Linear progress constraint sup for pitching p in triangle t:
// min over the two edges px of tau(x) + (1-eps) * phi_px * S * |px|.
HeightBound progress_sup_2d(const Front& front, int p, int tri, double slope,
                            double epsilon);

// True iff for every lowest vertex of the triangle the opposite (highest)
// edge qr satisfies (tau(r)-tau(q))/|qr| <= (1-eps) * S * phi_qr.
bool satisfies_progress(const Front& front, int tri, double slope,
                        double epsilon);

// Diminished width of a triangle whose apex is listed first:
// min{(1-eps) alt(apex), (1-phibar) alt(b), (1-phibar) alt(c)}.
double diminished_width(const TriangleShape& tri, double epsilon,
                        double phi_bar);

// The four adaptive progress inequalities for triangle (a,b,c) with apex a
// and base midpoint d: edges ab, bisector ad, ac, and bc, each bounded by a
// diminished width of a descendant shape times S.
bool satisfies_adaptive(const Front& front, int tri, double slope,
                        const ConstraintParams& params);

// Same test on a raw spacetime triangle with apex first.
bool satisfies_adaptive_shape(const TriangleShape& shape,
                              const std::array<double, 3>& tau, double slope,
                              const ConstraintParams& params);

// Largest tau'(p) for which the pitched triangle still satisfies all four
// adaptive inequalities.  Throws InvalidArgument on a bad parameter chain.
HeightBound adaptive_sup_2d(const Front& front, int p, int tri, double slope,
                            const ConstraintParams& params);

// Guaranteed tentpole height at a local minimum: min{eps, 1-eps} * w_p * S.
double min_tentpole_guarantee(double epsilon, double slope, double w_p);

// Width of vertex p over the current leaf triangulation.
double width_at_vertex(const FrontTriangulation& tri, int p);

// Shape-level variants used by the lookahead machinery, which explores
// hypothetical triangles that are not on any front.
double gradient_of(const TriangleShape& shape, const std::array<double, 3>& tau);
bool satisfies_progress_shape(const TriangleShape& shape,
                              const std::array<double, 3>& tau, double slope,
                              double epsilon);
double progress_sup_shape(const TriangleShape& shape,
                          const std::array<double, 3>& tau, int p_idx,
                          double slope, double epsilon);
STSimplex spacetime_triangle(const TriangleShape& shape,
                             const std::array<double, 3>& tau);

}  // namespace tentpitcher
