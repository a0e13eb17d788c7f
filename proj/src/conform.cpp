#include "tentpitcher/conform.hpp"

#include <algorithm>
#include <cmath>

namespace tentpitcher {

double choose_height(double tau_p, double sup, double target, double gamma,
                     double h_p) {
  if (!(tau_p == target || tau_p <= target - gamma * h_p))
    throw TpError(ErrorCode::InvariantViolation,
                  "choose_height: front invariant violated on entry");
  if (sup >= target) return target;
  if (sup >= target - gamma * h_p) return target - (1.0 - gamma) * h_p;
  return sup;
}

double choose_height_heuristic(double tau_p, double sup, double target) {
  if (sup >= target) return target;
  const double h = sup - tau_p;
  if (target - sup < h) return (target + tau_p) / 2.0;
  return sup;
}

double smooth_height(double h, double h_p, double gamma) {
  if (h > (1.0 + gamma) * h_p) return (h + h_p) / 2.0;
  return h;
}

TargetState assign_target_times(const Front& front, double gamma,
                                double epsilon, double min_slope,
                                double global_target) {
  const FrontTriangulation& tri = *front.tri;
  TargetState state;
  const int nv = static_cast<int>(tri.pos.size());
  state.target.assign(nv, global_target);
  state.h_p.assign(nv, 0.0);
  state.l_p.assign(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    if (!tri.valive[v] || tri.leaves_at_vertex(v).empty()) continue;
    state.h_p[v] =
        min_tentpole_guarantee(epsilon, min_slope, width_at_vertex(tri, v));
    state.l_p[v] = front.tau[v] + gamma * state.h_p[v];
  }

  // A coarsenable cluster sits around a leaf vertex s of positive level
  // whose incident leaves are all marked coarsenable.
  for (int s = 0; s < nv; ++s) {
    if (!tri.valive[s] || tri.vlevel[s] == 0) continue;
    const auto& around = tri.leaves_at_vertex(s);
    const bool interior = !tri.vboundary[s];
    if ((interior && around.size() != 4) || (!interior && around.size() != 2))
      continue;
    bool all_coarsenable = !around.empty();
    for (int t : around)
      if (!tri.tris[t].coarsenable) all_coarsenable = false;
    if (!all_coarsenable) continue;
    CoarsenCluster cluster;
    cluster.center = s;
    cluster.vertices.push_back(s);
    for (int v : tri.vertex_neighbors(s)) cluster.vertices.push_back(v);
    cluster.target = 0.0;
    for (int v : cluster.vertices)
      cluster.target = std::max(cluster.target, state.l_p[v]);
    state.clusters.push_back(std::move(cluster));
  }
  for (const auto& cluster : state.clusters)
    for (int v : cluster.vertices)
      state.target[v] = std::min(state.target[v], cluster.target);
  return state;
}

std::vector<int> coarsen_scheduler(FrontTriangulation& tri,
                                   std::vector<double>& tau,
                                   const TargetState& state,
                                   double coplanar_tol) {
  std::vector<int> executed;
  for (const auto& cluster : state.clusters) {
    if (!tri.valive[cluster.center]) continue;  // merged by an earlier cluster
    bool ready = true;
    for (int v : cluster.vertices)
      if (tau[v] != cluster.target) ready = false;
    if (!ready) continue;
    const auto& around = tri.leaves_at_vertex(cluster.center);
    if (around.empty()) continue;
    const CoarsenResult r = tri.derefine(around[0], tau, coplanar_tol);
    if (r.status == CoarsenStatus::Ok) executed.push_back(cluster.center);
  }
  return executed;
}

}  // namespace tentpitcher
