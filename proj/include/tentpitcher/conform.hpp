#pragma once

#include "tentpitcher/constraints.hpp"

namespace tentpitcher {

// Per-vertex target-time bookkeeping: the front maintains
// tau(p) == T_p or tau(p) <= T_p - gamma * h_p for every vertex.
struct CoarsenCluster {
  int center = -1;              // degree-4 vertex removed by the coarsening
  std::vector<int> vertices;    // the five (boundary: three) cluster vertices
  double target = 0.0;          // T_C = max l_v over the cluster
};

struct TargetState {
  std::vector<double> target;   // T_p per vertex
  std::vector<double> h_p;      // worst-case tentpole guarantee per vertex
  std::vector<double> l_p;      // lower bound tau(p) + gamma * h_p
  std::vector<CoarsenCluster> clusters;
};

// Three-case rule for the new tentpole top against the target time:
// at or past the target -> exactly T_p; within gamma*h_p of it -> back off
// to T_p - (1-gamma)*h_p; otherwise keep the sup.  The result always gains
// at least gamma*h_p.  Throws InvariantViolation when the entry state
// violates the front invariant.
double choose_height(double tau_p, double sup, double target, double gamma,
                     double h_p);

// Simpler conformity heuristic: past the target -> T_p; a gap smaller than
// the proposed height -> split the difference to (T_p + tau_p) / 2.
double choose_height_heuristic(double tau_p, double sup, double target);

// Smooths consecutive tentpole heights: h above (1+gamma)*h_p becomes the
// average (h + h_p) / 2.  Applied only when no target-time curtailment
// occurred.
double smooth_height(double h, double h_p, double gamma);

// Computes h_p, l_p, coarsenable clusters, and per-vertex targets: cluster
// vertices get the minimum cluster target over their clusters, everyone
// else the global target.
TargetState assign_target_times(const Front& front, double gamma,
                                double epsilon, double min_slope,
                                double global_target);

// Merges every cluster whose vertices have all reached the cluster target;
// returns the executed coarsenings (cluster centers).
std::vector<int> coarsen_scheduler(FrontTriangulation& tri,
                                   std::vector<double>& tau,
                                   const TargetState& state,
                                   double coplanar_tol);

}  // namespace tentpitcher
