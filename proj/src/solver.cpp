#include "tentpitcher/solver.hpp"

#include <algorithm>

namespace tentpitcher {

MockSolver::Evaluation MockSolver::evaluate(const Patch& patch) const {
  Evaluation eval;
  for (const auto& el : patch.elements) {
    if (el.front_tri < 0) continue;
    double diam = 0.0;
    for (size_t i = 0; i < el.verts.size(); ++i)
      for (size_t j = i + 1; j < el.verts.size(); ++j)
        diam = std::max(diam, dist(el.verts[i].x, el.verts[j].x));
    const double scale = target_scale.min_slope_over(el.verts);
    const double error = diam / scale;
    if (error > xi1) {
      eval.accepted = false;
      eval.refine_tris.push_back(el.front_tri);
    } else if (error < xi2) {
      eval.coarsenable_tris.push_back(el.front_tri);
    }
  }
  if (!eval.accepted) eval.coarsenable_tris.clear();
  return eval;
}

}  // namespace tentpitcher
