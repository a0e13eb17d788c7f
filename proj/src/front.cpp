#include "tentpitcher/front.hpp"

#include <algorithm>
#include <cmath>

namespace tentpitcher {

Front Front::flat(std::shared_ptr<const FrontTriangulation> t, double t0) {
  std::vector<double> tau(t->pos.size(), t0);
  return Front(std::move(t), std::move(tau));
}

STSimplex Front::facet(int t) const {
  STSimplex s;
  for (int i = 0; i < tri->cell_size(); ++i) {
    const int v = tri->tris[t].v[i];
    s.push_back({tri->pos[v], tau[v]});
  }
  return s;
}

double Front::min_time() const {
  double m = std::numeric_limits<double>::infinity();
  for (size_t v = 0; v < tri->pos.size(); ++v)
    if (tri->valive[v] && !tri->leaves_at_vertex(static_cast<int>(v)).empty())
      m = std::min(m, tau[v]);
  return m;
}

double Front::max_time() const {
  double m = -std::numeric_limits<double>::infinity();
  for (size_t v = 0; v < tri->pos.size(); ++v)
    if (tri->valive[v] && !tri->leaves_at_vertex(static_cast<int>(v)).empty())
      m = std::max(m, tau[v]);
  return m;
}

double edge_gradient(const Front& front, int x, int y) {
  const double len = dist(front.tri->pos[x], front.tri->pos[y]);
  if (len == 0.0)
    throw TpError(ErrorCode::DegenerateSimplex, "edge_gradient: zero edge");
  return std::abs(front.tau[y] - front.tau[x]) / len;
}

double gradient_mag(const Front& front, int t) {
  const auto& node = front.tri->tris[t];
  if (front.tri->dim == 1) return edge_gradient(front, node.v[0], node.v[1]);
  const Vec2 a = front.tri->pos[node.v[0]];
  const Vec2 u = front.tri->pos[node.v[1]] - a;
  const Vec2 w = front.tri->pos[node.v[2]] - a;
  const double det = u.cross(w);
  const TriangleShape shape = front.tri->shape(t);
  if (shape.degenerate())
    throw TpError(ErrorCode::DegenerateSimplex, "gradient_mag: degenerate");
  const double du = front.tau[node.v[1]] - front.tau[node.v[0]];
  const double dw = front.tau[node.v[2]] - front.tau[node.v[0]];
  // Solve g . u = du, g . w = dw.
  const double gx = (du * w.y - dw * u.y) / det;
  const double gy = (dw * u.x - du * w.x) / det;
  return std::hypot(gx, gy);
}

bool is_local_minimum(const Front& front, int p) {
  for (int q : front.tri->vertex_neighbors(p))
    if (front.tau[q] < front.tau[p]) return false;
  return true;
}

std::vector<int> local_minima(const Front& front) {
  std::vector<int> out;
  for (size_t v = 0; v < front.tri->pos.size(); ++v) {
    const int p = static_cast<int>(v);
    if (!front.tri->valive[v] || front.tri->leaves_at_vertex(p).empty())
      continue;
    if (is_local_minimum(front, p)) out.push_back(p);
  }
  return out;
}

Front advance_vertex(const Front& front, int p, double dt) {
  if (dt < 0.0)
    throw TpError(ErrorCode::InvalidArgument, "advance_vertex: dt < 0");
  Front next(front.tri, front.tau);
  next.tau[p] += dt;
  return next;
}

bool is_causal(const Front& front, const WavespeedField& field) {
  for (int t : front.tri->leaves()) {
    const double g = gradient_mag(front, t);
    if (g >= field.min_slope_over(front.facet(t))) return false;
  }
  return true;
}

}  // namespace tentpitcher
