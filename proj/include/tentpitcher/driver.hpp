#pragma once

#include <functional>
#include <map>
#include <random>
#include <string>

#include "tentpitcher/cones.hpp"
#include "tentpitcher/conform.hpp"
#include "tentpitcher/solver.hpp"

namespace tentpitcher {

// Deterministic uniform doubles independent of the standard library's
// distribution implementations.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned long long seed = 0) : gen(seed) {}
  double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int below(int n) { return std::min(n - 1, static_cast<int>(uniform() * n)); }
};

struct PitchPolicy {
  enum class Mode { Linear, Nonlocal, Adaptive, Unified, Conform };
  enum class Selection { GlobalMin, RandomLocalMin, MaxGuarantee };

  Mode mode = Mode::Linear;
  Selection selection = Selection::GlobalMin;
  ConstraintParams params;
  int horizon = 1;
  int lookahead = 1;
  double target_time = 1.0;
  long step_budget = 1000000;
  unsigned long long seed = 0;
  bool lazy_propagation = false;
  double coplanar_cutoff = 0.1;   // ignore the coplanarity constraint below
                                  // this fraction of the free height
  bool verify_each_step = true;

  // Observation hook invoked after each committed pitch, before any
  // coarsening: (vertex, t_old, t_new, triangulation at pitch time).
  std::function<void(int, double, double, const FrontTriangulation&)>
      pitch_audit;

  static Mode parse_mode(const std::string& s);
  static std::string mode_name(Mode m);
};

struct StepEvent {
  long step = 0;
  std::string op;  // pitch | refine | coarsen | flip
  int vertex = -1;
  double t_old = 0.0;
  double t_new = 0.0;
  std::string binding;
  int patch = -1;
};

struct RunReport {
  long steps = 0;
  long patches = 0;
  long elements = 0;
  double min_aspect = 1.0;
  double mean_aspect = 0.0;
  double min_tentpole = std::numeric_limits<double>::infinity();
  double count_bound = 0.0;       // Delta * ceil(n (T + diam maxS) / minT)
  double size_lower_bound = 0.0;  // floor(T / ((d-1) S D)); reported only
  bool causal_every_step = true;
  double wall_seconds = 0.0;
};

struct RunResult {
  SpacetimeMesh mesh;
  RunReport report;
  std::vector<StepEvent> events;
};

// The advancing-front driver.  Owns the working triangulation, time values,
// hierarchy, and the spacetime mesh under construction.
class Pitcher {
 public:
  Pitcher(const SpaceMesh& mesh, const WavespeedField& field,
          const MockSolver& solver, const PitchPolicy& policy);

  RunResult run();

  // Single-step pieces, exposed for tests.
  Front front() const { return Front(tri_, tau_); }
  int select_vertex();
  HeightBound pitch_bound(int p);
  FrontTriangulation& triangulation() { return *tri_; }
  std::vector<double>& times() { return tau_; }
  const BoundingConeHierarchy& hierarchy() const { return hierarchy_; }
  void mark_coarsenable(int tri, bool value = true) {
    tri_->tris[tri].coarsenable = value;
  }

 private:
  std::shared_ptr<FrontTriangulation> tri_;
  std::vector<double> tau_;
  WavespeedField field_;
  MockSolver solver_;
  PitchPolicy policy_;
  SpacetimeMesh stmesh_;
  std::vector<StepEvent> events_;
  BoundingConeHierarchy hierarchy_;
  int hierarchy_built_leaves_ = 0;
  Rng rng_;
  long step_ = 0;
  double min_slope_ = 1.0;
  double max_slope_ = 1.0;
  int initial_max_degree_ = 0;
  double aspect_sum_ = 0.0;
  long aspect_count_ = 0;
  RunReport report_;
  TargetState targets_;
  std::map<int, double> cluster_targets_;  // sticky per-center targets

  bool conforming() const { return policy_.mode == PitchPolicy::Mode::Conform; }
  bool adaptive_modes() const {
    return policy_.mode == PitchPolicy::Mode::Adaptive ||
           policy_.mode == PitchPolicy::Mode::Unified ||
           policy_.mode == PitchPolicy::Mode::Conform;
  }
  bool nonlocal_modes() const {
    return policy_.mode == PitchPolicy::Mode::Nonlocal ||
           policy_.mode == PitchPolicy::Mode::Unified;
  }

  bool front_done() const;
  double target_of(int p) const;
  void rebuild_hierarchy();
  void refresh_hierarchy_after_pitch(int p);
  void log(const std::string& op, int vertex, double t_old, double t_new,
           const std::string& binding, int patch);
  void log_adapt_ops(const AdaptLog& ops);
  double cone_causal_sup(int p, int tri) const;
  HeightBound tentpole_sup(int p);
  void commit_patch(const Patch& patch, int p, double t_new,
                    const std::string& binding);
  void apply_refinement(const std::vector<int>& tris);
  void try_coarsen_after_step();
  void assert_step_invariants(int pitched, double t_old, double t_new);
  double unified_sup(int p, int tri);
};

// Spacetime edge flip at the front level: pure retriangulation when the
// quad is coplanar in spacetime, otherwise a single-tetrahedron patch whose
// four facets must be causal.
struct FlipOutcome {
  FlipStatus status = FlipStatus::FlipRejected;
  bool has_patch = false;
  Patch patch;
};

FlipOutcome spacetime_flip(FrontTriangulation& tri, std::vector<double>& tau,
                           int d0, int d1, const WavespeedField& field,
                           AdaptLog& log);

// Coarsens marked regions, resolving refinement-propagation loops (no
// degree-4 vertex) with an edge flip before de-refining.  Returns removed
// center vertices.
std::vector<int> coarsen_region(FrontTriangulation& tri,
                                std::vector<double>& tau, double coplanar_tol,
                                AdaptLog& log);

}  // namespace tentpitcher
