#include "tentpitcher/constraints.hpp"

#include <algorithm>
#include <cmath>

namespace tentpitcher {

void ConstraintParams::validate() const {
  if (!(0.0 < epsilon && epsilon < phi_bar && phi_bar < (1.0 + epsilon) / 2.0))
    throw TpError(ErrorCode::InvalidArgument,
                  "require 0 < epsilon < phi_bar < (1+epsilon)/2");
  if (!(0.0 < gamma && gamma <= 0.5))
    throw TpError(ErrorCode::InvalidArgument, "require 0 < gamma <= 1/2");
  if (!(0.0 < delta_margin && delta_margin < 1.0))
    throw TpError(ErrorCode::InvalidArgument, "require 0 < delta < 1");
}

std::string HeightBound::label() const {
  switch (kind) {
    case BindingKind::Causality:
      return "causality";
    case BindingKind::ProgressEdge:
      return "progress-edge:" + std::to_string(vertex_a);
    case BindingKind::AdaptiveCase:
      return "adaptive:" + std::to_string(vertex_a) + ":" +
             std::to_string(term);
    case BindingKind::TargetTime:
      return "target-time";
    case BindingKind::Coplanarity:
      return "coplanarity";
    case BindingKind::RemoteCone:
      return "remote-cone";
    case BindingKind::None:
      return "none";
  }
  return "none";
}

HeightBound causal_sup_1d(const Front& front, int p,
                          const std::function<double(int)>& segment_slope) {
  HeightBound bound;
  bound.kind = BindingKind::Causality;
  for (int t : front.tri->leaves_at_vertex(p)) {
    const auto& node = front.tri->tris[t];
    const int q = (node.v[0] == p) ? node.v[1] : node.v[0];
    const double sup = front.tau[q] +
                       dist(front.tri->pos[p], front.tri->pos[q]) *
                           segment_slope(t);
    bound.sup = std::min(bound.sup, sup);
  }
  return bound;
}

HeightBound causal_sup_2d(const Front& front, int p, int tri, double slope) {
  const auto& node = front.tri->tris[tri];
  int q = -1, r = -1;
  for (int i = 0; i < 3; ++i) {
    if (node.v[i] == p) continue;
    (q < 0 ? q : r) = node.v[i];
  }
  const Vec2 pp = front.tri->pos[p];
  const Vec2 qq = front.tri->pos[q];
  const Vec2 rr = front.tri->pos[r];
  const double g = edge_gradient(front, q, r);
  if (g >= slope)
    throw TpError(ErrorCode::CausalityAlreadyViolated,
                  "causal_sup_2d: opposite edge gradient >= slope");
  const Vec2 foot = foot_of_perpendicular(pp, qq, rr);
  // tau at the foot: linear extension of tau along line qr.
  const Vec2 dqr = rr - qq;
  const double s = (foot - qq).dot(dqr) / dqr.norm2();
  const double tau_foot = front.tau[q] + s * (front.tau[r] - front.tau[q]);
  HeightBound bound;
  bound.kind = BindingKind::Causality;
  bound.sup = tau_foot + dist(pp, foot) * std::sqrt(slope * slope - g * g);
  return bound;
}

HeightBound progress_sup_2d(const Front& front, int p, int tri, double slope,
                            double epsilon) {
  const auto& node = front.tri->tris[tri];
  const TriangleShape shape = front.tri->shape(tri);
  HeightBound bound;
  bound.kind = BindingKind::ProgressEdge;
  for (int i = 0; i < 3; ++i) {
    const int x = node.v[i];
    if (x == p) continue;
    int opposite = -1;  // corner index of the vertex opposite edge px
    for (int k = 0; k < 3; ++k)
      if (node.v[k] != p && node.v[k] != x) opposite = k;
    const double len = dist(front.tri->pos[p], front.tri->pos[x]);
    const double sup = front.tau[x] +
                       (1.0 - epsilon) * phi_edge(shape, opposite) * slope * len;
    if (sup < bound.sup) {
      bound.sup = sup;
      bound.vertex_a = x;
    }
  }
  return bound;
}

bool satisfies_progress(const Front& front, int tri, double slope,
                        double epsilon) {
  const auto& node = front.tri->tris[tri];
  const TriangleShape shape = front.tri->shape(tri);
  for (int i = 0; i < 3; ++i) {
    const int v = node.v[i];
    const int a = node.v[(i + 1) % 3];
    const int b = node.v[(i + 2) % 3];
    const bool lowest = front.tau[v] <= front.tau[a] && front.tau[v] <= front.tau[b];
    if (!lowest) continue;
    const double len = dist(front.tri->pos[a], front.tri->pos[b]);
    if (std::abs(front.tau[b] - front.tau[a]) >
        (1.0 - epsilon) * slope * phi_edge(shape, i) * len)
      return false;
  }
  return true;
}

double diminished_width(const TriangleShape& tri, double epsilon,
                        double phi_bar) {
  if (tri.degenerate())
    throw TpError(ErrorCode::DegenerateSimplex, "diminished_width: degenerate");
  return std::min({(1.0 - epsilon) * tri.altitude(0),
                   (1.0 - phi_bar) * tri.altitude(1),
                   (1.0 - phi_bar) * tri.altitude(2)});
}

namespace {

struct AdaptiveConstraint {
  // |k_a tau(a) + k_b tau(b) + k_c tau(c)| <= rhs
  double ka, kb, kc;
  double rhs;
};

// The four adaptive inequalities for triangle (a, b, c) with apex a, with d,
// e the midpoints of bc and ac.  rhs factors carry the diminished widths of
// the relevant descendants.
std::array<AdaptiveConstraint, 4> adaptive_constraints(
    const TriangleShape& shape, double slope, const ConstraintParams& params) {
  const Vec2 a = shape.v[0], b = shape.v[1], c = shape.v[2];
  const Vec2 d = midpoint(b, c);
  const Vec2 e = midpoint(a, c);
  const double ep = params.epsilon, f = params.phi_bar;
  std::array<AdaptiveConstraint, 4> out;
  // edge ab
  out[0] = {1.0, -1.0, 0.0,
            2.0 * diminished_width({d, c, a}, ep, f) * slope};
  // bisector ad; tau(d) = (tau(b) + tau(c)) / 2
  out[1] = {1.0, -0.5, -0.5, diminished_width({a, b, c}, ep, f) * slope};
  // edge ac
  out[2] = {1.0, 0.0, -1.0,
            2.0 * diminished_width({d, a, b}, ep, f) * slope};
  // edge bc
  out[3] = {0.0, 1.0, -1.0,
            4.0 * diminished_width({e, a, d}, ep, f) * slope};
  return out;
}

}  // namespace

bool satisfies_adaptive_shape(const TriangleShape& shape,
                              const std::array<double, 3>& tau, double slope,
                              const ConstraintParams& params) {
  for (const auto& con : adaptive_constraints(shape, slope, params)) {
    const double lhs = con.ka * tau[0] + con.kb * tau[1] + con.kc * tau[2];
    if (std::abs(lhs) > con.rhs) return false;
  }
  return true;
}

bool satisfies_adaptive(const Front& front, int tri, double slope,
                        const ConstraintParams& params) {
  const auto& node = front.tri->tris[tri];
  return satisfies_adaptive_shape(
      front.tri->shape(tri),
      {front.tau[node.v[0]], front.tau[node.v[1]], front.tau[node.v[2]]},
      slope, params);
}

HeightBound adaptive_sup_2d(const Front& front, int p, int tri, double slope,
                            const ConstraintParams& params) {
  params.validate();
  const auto& node = front.tri->tris[tri];
  int idx = -1;
  for (int i = 0; i < 3; ++i)
    if (node.v[i] == p) idx = i;
  if (idx < 0)
    throw TpError(ErrorCode::InvalidArgument,
                  "adaptive_sup_2d: p not a vertex of tri");
  const TriangleShape shape = front.tri->shape(tri);
  const std::array<double, 3> tau = {front.tau[node.v[0]], front.tau[node.v[1]],
                                     front.tau[node.v[2]]};
  HeightBound bound;
  bound.kind = BindingKind::AdaptiveCase;
  bound.vertex_a = node.v[0];
  const auto cons = adaptive_constraints(shape, slope, params);
  for (int k = 0; k < 4; ++k) {
    const double coef = (idx == 0) ? cons[k].ka : (idx == 1) ? cons[k].kb
                                                             : cons[k].kc;
    if (coef == 0.0) continue;
    // Solve coef * tau'(p) + rest = +/- rhs for the binding direction.
    double rest = 0.0;
    if (idx != 0) rest += cons[k].ka * tau[0];
    if (idx != 1) rest += cons[k].kb * tau[1];
    if (idx != 2) rest += cons[k].kc * tau[2];
    const double sup = (coef > 0.0) ? (cons[k].rhs - rest) / coef
                                    : (-cons[k].rhs - rest) / coef;
    if (sup < bound.sup) {
      bound.sup = sup;
      bound.term = k;
    }
  }
  return bound;
}

double min_tentpole_guarantee(double epsilon, double slope, double w_p) {
  return std::min(epsilon, 1.0 - epsilon) * w_p * slope;
}

double width_at_vertex(const FrontTriangulation& tri, int p) {
  double w = std::numeric_limits<double>::infinity();
  const auto& leaves = tri.leaves_at_vertex(p);
  if (leaves.empty())
    throw TpError(ErrorCode::IsolatedVertex, "width_at_vertex: isolated");
  for (int t : leaves) {
    const auto& node = tri.tris[t];
    if (tri.dim == 1) {
      w = std::min(w, dist(tri.pos[node.v[0]], tri.pos[node.v[1]]));
    } else {
      for (int i = 0; i < 3; ++i)
        if (node.v[i] == p)
          w = std::min(w, dist_point_line(tri.pos[p], tri.pos[node.v[(i + 1) % 3]],
                                          tri.pos[node.v[(i + 2) % 3]]));
    }
  }
  return w;
}

double gradient_of(const TriangleShape& shape,
                   const std::array<double, 3>& tau) {
  const Vec2 u = shape.v[1] - shape.v[0];
  const Vec2 w = shape.v[2] - shape.v[0];
  const double det = u.cross(w);
  if (det == 0.0)
    throw TpError(ErrorCode::DegenerateSimplex, "gradient_of: degenerate");
  const double du = tau[1] - tau[0];
  const double dw = tau[2] - tau[0];
  const double gx = (du * w.y - dw * u.y) / det;
  const double gy = (dw * u.x - du * w.x) / det;
  return std::hypot(gx, gy);
}

bool satisfies_progress_shape(const TriangleShape& shape,
                              const std::array<double, 3>& tau, double slope,
                              double epsilon) {
  for (int i = 0; i < 3; ++i) {
    const int a = (i + 1) % 3;
    const int b = (i + 2) % 3;
    if (!(tau[i] <= tau[a] && tau[i] <= tau[b])) continue;
    const double len = dist(shape.v[a], shape.v[b]);
    if (std::abs(tau[b] - tau[a]) >
        (1.0 - epsilon) * slope * phi_edge(shape, i) * len)
      return false;
  }
  return true;
}

double progress_sup_shape(const TriangleShape& shape,
                          const std::array<double, 3>& tau, int p_idx,
                          double slope, double epsilon) {
  double sup = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (i == p_idx) continue;
    const int opposite = 3 - i - p_idx;
    const double len = dist(shape.v[p_idx], shape.v[i]);
    sup = std::min(sup, tau[i] + (1.0 - epsilon) * phi_edge(shape, opposite) *
                                     slope * len);
  }
  return sup;
}

STSimplex spacetime_triangle(const TriangleShape& shape,
                             const std::array<double, 3>& tau) {
  return {STPoint(shape.v[0], tau[0]), STPoint(shape.v[1], tau[1]),
          STPoint(shape.v[2], tau[2])};
}

}  // namespace tentpitcher
