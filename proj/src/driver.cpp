#include "tentpitcher/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace tentpitcher {

PitchPolicy::Mode PitchPolicy::parse_mode(const std::string& s) {
  if (s == "linear") return Mode::Linear;
  if (s == "nonlocal") return Mode::Nonlocal;
  if (s == "adaptive") return Mode::Adaptive;
  if (s == "unified") return Mode::Unified;
  if (s == "conform") return Mode::Conform;
  throw TpError(ErrorCode::InvalidArgument, "unknown mode: " + s);
}

std::string PitchPolicy::mode_name(Mode m) {
  switch (m) {
    case Mode::Linear: return "linear";
    case Mode::Nonlocal: return "nonlocal";
    case Mode::Adaptive: return "adaptive";
    case Mode::Unified: return "unified";
    case Mode::Conform: return "conform";
  }
  return "linear";
}

Pitcher::Pitcher(const SpaceMesh& mesh, const WavespeedField& field,
                 const MockSolver& solver, const PitchPolicy& policy)
    : field_(field), solver_(solver), policy_(policy), rng_(policy.seed) {
  policy_.params.validate();
  tri_ = std::make_shared<FrontTriangulation>(
      FrontTriangulation::from_space_mesh(mesh));
  tau_.assign(tri_->pos.size(), 0.0);
  stmesh_.dim = mesh.dim;
  min_slope_ = field_.min_slope();
  max_slope_ = field_.max_slope();
  if (!(min_slope_ > 0.0))
    throw TpError(ErrorCode::InvalidArgument, "field: min slope must be > 0");

  // Theoretical count bound from the initial mesh.
  const int n = static_cast<int>(mesh.vertices.size());
  int delta = 0;
  std::vector<int> star(mesh.vertices.size(), 0);
  for (const auto& cell : mesh.cells)
    for (int i = 0; i < mesh.cell_size(); ++i) ++star[cell[i]];
  for (int s : star) delta = std::max(delta, s);
  double w_min = std::numeric_limits<double>::infinity();
  for (int v = 0; v < n; ++v) w_min = std::min(w_min, width_at_vertex(mesh, v));
  initial_max_degree_ = tri_->max_vertex_degree();
  const double diam = mesh.diameter();
  const double min_t =
      policy_.params.epsilon_hat() * min_slope_ * w_min;
  report_.count_bound =
      std::ceil(n * (policy_.target_time + diam * max_slope_) / min_t) * delta;
  if (mesh.dim == 2)
    report_.size_lower_bound =
        std::floor(policy_.target_time / (min_slope_ * diam));

  if (nonlocal_modes()) rebuild_hierarchy();
}

bool Pitcher::front_done() const {
  for (size_t v = 0; v < tri_->pos.size(); ++v) {
    if (!tri_->valive[v] || tri_->leaves_at_vertex(static_cast<int>(v)).empty())
      continue;
    if (conforming()) {
      if (tau_[v] != policy_.target_time) return false;
    } else {
      if (tau_[v] < policy_.target_time) return false;
    }
  }
  return true;
}

double Pitcher::target_of(int p) const {
  if (conforming() && !targets_.target.empty()) return targets_.target[p];
  return policy_.target_time;
}

int Pitcher::select_vertex() {
  const Front f = front();
  std::vector<int> eligible;
  for (int p : local_minima(f))
    if (tau_[p] < target_of(p)) eligible.push_back(p);
  if (eligible.empty())
    throw TpError(conforming() ? ErrorCode::CycleUnsupported
                               : ErrorCode::FrontConformed,
                  "select_vertex: no eligible local minimum");
  switch (policy_.selection) {
    case PitchPolicy::Selection::GlobalMin: {
      int best = eligible[0];
      for (int p : eligible)
        if (tau_[p] < tau_[best]) best = p;
      return best;
    }
    case PitchPolicy::Selection::RandomLocalMin:
      return eligible[rng_.below(static_cast<int>(eligible.size()))];
    case PitchPolicy::Selection::MaxGuarantee: {
      int best = eligible[0];
      double bg = -1.0;
      for (int p : eligible) {
        const double g = min_tentpole_guarantee(
            policy_.params.epsilon, min_slope_, width_at_vertex(*tri_, p));
        if (g > bg) {
          bg = g;
          best = p;
        }
      }
      return best;
    }
  }
  return eligible[0];
}

void Pitcher::rebuild_hierarchy() {
  hierarchy_.build(front(), field_);
  hierarchy_built_leaves_ = hierarchy_.leaf_count();
}

void Pitcher::refresh_hierarchy_after_pitch(int p) {
  if (!nonlocal_modes()) return;
  const Front f = front();
  for (int t : tri_->leaves_at_vertex(p)) {
    if (!hierarchy_.has_leaf(t)) {
      rebuild_hierarchy();
      return;
    }
    const STSimplex facet = f.facet(t);
    hierarchy_.update_leaf(t, facet, field_.min_slope_over(facet));
  }
  const int drift =
      std::abs(tri_->leaf_count() - hierarchy_built_leaves_);
  if (hierarchy_built_leaves_ > 0 &&
      drift * 4 > hierarchy_built_leaves_)
    rebuild_hierarchy();
}

void Pitcher::log(const std::string& op, int vertex, double t_old,
                  double t_new, const std::string& binding, int patch) {
  StepEvent e;
  e.step = static_cast<long>(events_.size());
  e.op = op;
  e.vertex = vertex;
  e.t_old = t_old;
  e.t_new = t_new;
  e.binding = binding;
  e.patch = patch;
  events_.push_back(std::move(e));
}

void Pitcher::log_adapt_ops(const AdaptLog& ops) {
  for (const auto& op : ops) {
    if (op.kind == AdaptOp::Bisect) {
      const int m = op.new_vertex;
      log("refine", m, tau_[m], tau_[m],
          "bisect:" + std::to_string(op.edge.first) + "-" +
              std::to_string(op.edge.second),
          -1);
    } else {
      log("flip", op.edge.first, tau_[op.edge.first], tau_[op.edge.first],
          "flip:" + std::to_string(op.edge.first) + "-" +
              std::to_string(op.edge.second),
          -1);
    }
  }
}

// Nonlocal causality bound for pitching p over one incident cell: the
// local part is the closed-form causal sup under the star's own cone
// slopes; the remote part keeps the lifted facet below every cone of a
// facet outside the star.
double Pitcher::cone_causal_sup(int p, int tri) const {
  const Front f(tri_, tau_);
  const auto star = tri_->leaves_at_vertex(p);
  auto exclude = [&star](int t) {
    return std::find(star.begin(), star.end(), t) != star.end();
  };
  double s_local = std::numeric_limits<double>::infinity();
  for (int t : star) s_local = std::min(s_local, field_.min_slope_over(f.facet(t)));

  if (tri_->dim == 1) {
    const auto& node = tri_->tris[tri];
    const int q = (node.v[0] == p) ? node.v[1] : node.v[0];
    const double t_local =
        tau_[q] + dist(tri_->pos[p], tri_->pos[q]) * s_local;
    const double t_remote = hierarchy_.first_entry_vertical(tri_->pos[p],
                                                            exclude).t;
    return std::min(t_local, t_remote);
  }

  const auto& node = tri_->tris[tri];
  const TriangleShape shape = tri_->shape(tri);
  std::array<double, 3> tau{};
  int idx = -1;
  for (int i = 0; i < 3; ++i) {
    tau[i] = tau_[node.v[i]];
    if (node.v[i] == p) idx = i;
  }
  const Front base(tri_, tau_);
  double t_local;
  try {
    t_local = causal_sup_2d(base, p, tri, s_local).sup;
  } catch (const TpError&) {
    return tau_[p];
  }
  const double band = 1e-12 * std::max(1.0, std::abs(policy_.target_time));
  auto below_remote = [&](double t) {
    std::array<double, 3> lt = tau;
    lt[idx] = t;
    return !hierarchy_.any_cone_intersecting(spacetime_triangle(shape, lt),
                                             exclude, band);
  };
  double lo = tau_[p];
  double hi = t_local;
  if (hi <= lo) return lo;
  if (below_remote(hi)) return hi;
  if (!below_remote(lo)) return t_local;  // stale estimate; field audit rules
  for (int i = 0; i < 45; ++i) {
    const double mid = lo + (hi - lo) / 2.0;
    if (below_remote(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double Pitcher::unified_sup(int p, int tri) {
  const auto& node = tri_->tris[tri];
  const TriangleShape shape = tri_->shape(tri);
  std::array<double, 3> tau{};
  int idx = -1;
  for (int i = 0; i < 3; ++i) {
    tau[i] = tau_[node.v[i]];
    if (node.v[i] == p) idx = i;
  }
  LookaheadParams lp;
  lp.constraints = policy_.params;
  lp.min_slope = min_slope_;
  auto progressive_at = [&](double t) {
    std::array<double, 3> lt = tau;
    lt[idx] = t;
    return is_hl_progressive_shape(shape, lt, policy_.horizon,
                                   policy_.lookahead, field_, lp);
  };
  double lo = tau_[p];
  double hi = cone_causal_sup(p, tri);
  if (hi <= lo) return lo;
  if (progressive_at(hi)) return hi;
  if (!progressive_at(lo)) return lo;
  for (int i = 0; i < 50; ++i) {
    const double mid = lo + (hi - lo) / 2.0;
    if (progressive_at(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

HeightBound Pitcher::pitch_bound(int p) { return tentpole_sup(p); }

HeightBound Pitcher::tentpole_sup(int p) {
  const Front f(tri_, tau_);
  HeightBound best;
  if (tri_->dim == 1) {
    if (policy_.mode == PitchPolicy::Mode::Nonlocal) {
      // Local part: the smallest slope over the star's own facets (a facet
      // only touches its own cone, so this is a field lookup, not an
      // intersection query).  Remote part: exact ray shooting.
      double s_local = std::numeric_limits<double>::infinity();
      for (int t : tri_->leaves_at_vertex(p))
        s_local = std::min(s_local, field_.min_slope_over(f.facet(t)));
      HeightBound local = causal_sup_1d(f, p, [&](int) { return s_local; });
      const double remote = t_remote_exact_1d(f, p, hierarchy_);
      if (remote < local.sup) {
        best.sup = remote;
        best.kind = BindingKind::RemoteCone;
        return best;
      }
      return local;
    }
    return causal_sup_1d(f, p, [&](int) { return min_slope_; });
  }

  LookaheadParams lp;
  lp.constraints = policy_.params;
  lp.min_slope = min_slope_;
  for (int t : tri_->leaves_at_vertex(p)) {
    HeightBound tri_bound;
    switch (policy_.mode) {
      case PitchPolicy::Mode::Linear: {
        tri_bound = min_bound(causal_sup_2d(f, p, t, min_slope_),
                              progress_sup_2d(f, p, t, min_slope_,
                                              policy_.params.epsilon));
        break;
      }
      case PitchPolicy::Mode::Nonlocal: {
        const ProgressResult r =
            maximize_progress(f, p, t, std::max(1, policy_.horizon), field_, lp);
        HeightBound hb;
        hb.sup = r.t_star;
        hb.kind = BindingKind::ProgressEdge;
        hb.vertex_a = tri_->tris[t].v[0];
        // The remote-cone bound never undercuts the guaranteed lift, which
        // stays below remote cones by the no-focusing argument.
        const double guaranteed =
            tau_[p] + (1.0 - policy_.params.delta_margin) *
                          min_tentpole_guarantee(policy_.params.epsilon,
                                                 min_slope_,
                                                 width_at_vertex(*tri_, p));
        const double cone = std::max(cone_causal_sup(p, t), guaranteed);
        if (cone < hb.sup) {
          hb.sup = cone;
          hb.kind = BindingKind::RemoteCone;
        }
        tri_bound = hb;
        break;
      }
      case PitchPolicy::Mode::Adaptive:
      case PitchPolicy::Mode::Conform: {
        if (conforming()) {
          tri_bound = min_bound(causal_sup_2d(f, p, t, min_slope_),
                                progress_sup_2d(f, p, t, min_slope_,
                                                policy_.params.epsilon));
        } else {
          tri_bound = min_bound(
              causal_sup_2d(f, p, t, min_slope_),
              adaptive_sup_2d(f, p, t, min_slope_, policy_.params));
        }
        break;
      }
      case PitchPolicy::Mode::Unified: {
        HeightBound hb;
        hb.sup = unified_sup(p, t);
        hb.kind = BindingKind::AdaptiveCase;
        hb.vertex_a = tri_->tris[t].v[0];
        tri_bound = hb;
        break;
      }
    }
    best = min_bound(best, tri_bound);
  }
  return best;
}

void Pitcher::commit_patch(const Patch& patch, int p, double t_new,
                           const std::string& binding) {
  const int pid = stmesh_.append_patch(patch, static_cast<long>(events_.size()));
  for (const auto& el : patch.elements) {
    const double ratio = temporal_aspect_ratio(el.verts);
    report_.min_aspect = std::min(report_.min_aspect, ratio);
    aspect_sum_ += ratio;
    ++aspect_count_;
  }
  report_.elements += static_cast<long>(patch.elements.size());
  ++report_.patches;
  report_.min_tentpole =
      std::min(report_.min_tentpole, t_new - patch.t_bottom);
  log("pitch", p, patch.t_bottom, t_new, binding, pid);
}

void Pitcher::apply_refinement(const std::vector<int>& tris) {
  std::set<int> unique(tris.begin(), tris.end());
  for (int t : unique) {
    if (!tri_->is_leaf(t)) continue;  // already split by propagation
    const AdaptLog ops = policy_.lazy_propagation
                             ? tri_->refine_lazy(t, tau_)
                             : tri_->refine_earnest(t, tau_);
    log_adapt_ops(ops);
  }
  if (policy_.verify_each_step && tri_->dim == 2 &&
      tri_->max_vertex_degree() > std::max(initial_max_degree_ + 5, 8))
    throw TpError(ErrorCode::InvariantViolation,
                  "vertex degree exceeds refinement bound");
  if (nonlocal_modes()) rebuild_hierarchy();
}

void Pitcher::try_coarsen_after_step() {
  // Merge coarsenable sibling pairs that are coplanar on the new front.
  // In unified mode the merged triangles must themselves stay
  // (h,l)-progressive.
  bool changed = true;
  const double tol = 1e-9 * std::max(1.0, std::abs(policy_.target_time));
  while (changed) {
    changed = false;
    for (int t : tri_->leaves()) {
      const auto& node = tri_->tris[t];
      if (!node.coarsenable || node.level == 0) continue;
      const int s = node.v[0];
      if (!tri_->valive[s] || tri_->vlevel[s] == 0) continue;
      bool all_marked = true;
      for (int u : tri_->leaves_at_vertex(s))
        if (!tri_->tris[u].coarsenable) all_marked = false;
      if (!all_marked) continue;
      if (policy_.mode == PitchPolicy::Mode::Unified) {
        FrontTriangulation trial = *tri_;
        const CoarsenResult probe = trial.derefine(t, tau_, tol);
        if (probe.status != CoarsenStatus::Ok) continue;
        LookaheadParams lp;
        lp.constraints = policy_.params;
        lp.min_slope = min_slope_;
        const Front merged(std::make_shared<FrontTriangulation>(trial), tau_);
        bool still_progressive = true;
        for (int rv : probe.revived)
          if (!is_hl_progressive(merged, rv, policy_.horizon,
                                 policy_.lookahead, field_, lp))
            still_progressive = false;
        if (!still_progressive) continue;
      }
      const CoarsenResult r = tri_->derefine(t, tau_, tol);
      if (r.status == CoarsenStatus::Ok) {
        for (int v : r.removed_vertices)
          log("coarsen", v, tau_[v], tau_[v], "derefine", -1);
        changed = true;
        if (nonlocal_modes()) rebuild_hierarchy();
        break;
      }
    }
  }
}

void Pitcher::assert_step_invariants(int pitched, double t_old, double t_new) {
  if (!policy_.verify_each_step) return;
  const Front f = front();
  if (!is_causal(f, field_)) {
    report_.causal_every_step = false;
    throw TpError(ErrorCode::InvariantViolation, "front not causal after step");
  }
  // The causal band: the front spread is bounded by the domain size.
  const double band = f.max_time() - f.min_time();
  double diam = 0.0;
  for (size_t i = 0; i < tri_->pos.size(); ++i)
    for (size_t j = i + 1; j < tri_->pos.size(); ++j)
      if (tri_->valive[i] && tri_->valive[j])
        diam = std::max(diam, dist(tri_->pos[i], tri_->pos[j]));
  if (band > diam * max_slope_ + 1e-9)
    throw TpError(ErrorCode::InvariantViolation, "front exceeds causal band");

  if (pitched >= 0 && !tri_->leaves_at_vertex(pitched).empty()) {
    const double height = t_new - t_old;
    const double delta = policy_.params.delta_margin;
    double floor = 0.0;
    const double w = width_at_vertex(*tri_, pitched);
    switch (policy_.mode) {
      case PitchPolicy::Mode::Linear:
      case PitchPolicy::Mode::Nonlocal:
        // The sup clears the guarantee; the committed height gives back
        // the feasibility margin delta.
        floor = (1.0 - delta) * min_tentpole_guarantee(policy_.params.epsilon,
                                                       min_slope_, w) -
                1e-12;
        break;
      case PitchPolicy::Mode::Conform:
        floor = (policy_.params.gamma - delta) * targets_.h_p[pitched] - 1e-12;
        break;
      default:
        floor = 0.0;
    }
    if (height < floor)
      throw TpError(ErrorCode::InvariantViolation,
                    "tentpole below progress guarantee");
  }

  if (policy_.mode == PitchPolicy::Mode::Linear && tri_->dim == 2) {
    for (int t : tri_->leaves())
      if (!satisfies_progress(f, t, min_slope_, policy_.params.epsilon))
        throw TpError(ErrorCode::InvariantViolation,
                      "front violates progress constraint");
  }
  if ((policy_.mode == PitchPolicy::Mode::Adaptive) && tri_->dim == 2) {
    for (int t : tri_->leaves())
      if (!satisfies_adaptive(f, t, min_slope_, policy_.params))
        throw TpError(ErrorCode::InvariantViolation,
                      "front violates adaptive progress constraint");
  }
}

RunResult Pitcher::run() {
  const auto start = std::chrono::steady_clock::now();
  if (!std::isfinite(policy_.target_time))
    throw TpError(ErrorCode::InvalidArgument, "run: finite target time required");
  long iterations = 0;
  while (!front_done()) {
    if (++iterations > policy_.step_budget)
      throw TpError(ErrorCode::BudgetExceeded, "step budget exceeded");

    if (conforming()) {
      targets_ = assign_target_times(front(), policy_.params.gamma,
                                     policy_.params.epsilon, min_slope_,
                                     policy_.target_time);
      // Cluster targets are assigned once, when the cluster appears, and
      // persist until it merges or dissolves; recomputing them every step
      // would let the synchronization time drift upward forever.  A new
      // cluster is admitted only if merging at its target keeps the front
      // invariant against the global target afterwards.
      std::set<int> live_centers;
      for (auto& cluster : targets_.clusters) {
        live_centers.insert(cluster.center);
        auto it = cluster_targets_.find(cluster.center);
        if (it != cluster_targets_.end()) {
          cluster.target = it->second;
          continue;
        }
        auto trial = *tri_;
        std::vector<double> trial_tau = tau_;
        for (int v : cluster.vertices) trial_tau[v] = cluster.target;
        const auto around = trial.leaves_at_vertex(cluster.center);
        bool ok = !around.empty();
        if (ok) {
          const CoarsenResult r = trial.derefine(around[0], trial_tau, 1e-9);
          ok = (r.status == CoarsenStatus::Ok);
          if (ok) {
            for (int v : cluster.vertices) {
              if (v == cluster.center || !trial.valive[v]) continue;
              const double h = min_tentpole_guarantee(
                  policy_.params.epsilon, min_slope_,
                  width_at_vertex(trial, v));
              if (cluster.target != policy_.target_time &&
                  cluster.target >
                      policy_.target_time - policy_.params.gamma * h)
                ok = false;
            }
          }
        }
        if (ok) {
          cluster_targets_[cluster.center] = cluster.target;
        } else {
          for (int t : tri_->leaves_at_vertex(cluster.center))
            tri_->tris[t].coarsenable = false;
        }
      }
      for (auto it = cluster_targets_.begin(); it != cluster_targets_.end();) {
        if (!live_centers.count(it->first))
          it = cluster_targets_.erase(it);
        else
          ++it;
      }
      // Re-derive per-vertex targets from the sticky cluster times.
      for (auto& t : targets_.target) t = policy_.target_time;
      targets_.clusters.erase(
          std::remove_if(targets_.clusters.begin(), targets_.clusters.end(),
                         [&](const CoarsenCluster& c) {
                           return !cluster_targets_.count(c.center);
                         }),
          targets_.clusters.end());
      for (auto& cluster : targets_.clusters) {
        cluster.target = cluster_targets_[cluster.center];
        for (int v : cluster.vertices)
          targets_.target[v] = std::min(targets_.target[v], cluster.target);
      }
      for (size_t v = 0; v < tri_->pos.size(); ++v) {
        if (!tri_->valive[v] ||
            tri_->leaves_at_vertex(static_cast<int>(v)).empty())
          continue;
        const double tp = targets_.target[v];
        if (!(tau_[v] == tp ||
              tau_[v] <= tp - policy_.params.gamma * targets_.h_p[v] + 1e-12))
          throw TpError(ErrorCode::InvariantViolation,
                        "target-time invariant violated");
      }
    }

    const int p = select_vertex();
    if (policy_.lazy_propagation)
      log_adapt_ops(tri_->cleanup_before_pitching(p, tau_));

    const HeightBound sup = tentpole_sup(p);
    const double t_old = tau_[p];
    double t_new;
    std::string binding = sup.label();

    if (conforming()) {
      const double h_p = targets_.h_p[p];
      const double chosen =
          choose_height(t_old, sup.sup, targets_.target[p],
                        policy_.params.gamma, h_p);
      if (chosen == targets_.target[p]) {
        t_new = chosen;
        binding = "target-time";
      } else if (chosen < sup.sup) {
        t_new = chosen;
        binding = "target-backoff";
      } else {
        const double h = smooth_height(sup.sup - t_old, h_p,
                                       policy_.params.gamma);
        t_new = (h < sup.sup - t_old)
                    ? t_old + h
                    : feasible_height(t_old, sup.sup,
                                      policy_.params.delta_margin);
      }
    } else {
      t_new = feasible_height(t_old, sup.sup, policy_.params.delta_margin);
      if (adaptive_modes() && tri_->dim == 2) {
        // Coplanarity constraint: lower the top so a coarsenable cluster
        // whose chord ends at p becomes mergeable, unless that costs more
        // than nine tenths of the free height.
        const double free_height = t_new - t_old;
        for (int q : tri_->vertex_neighbors(p)) {
          if (!tri_->valive[q] || tri_->vlevel[q] == 0) continue;
          bool marked = !tri_->leaves_at_vertex(q).empty();
          for (int t : tri_->leaves_at_vertex(q))
            if (!tri_->tris[t].coarsenable) marked = false;
          if (!marked) continue;
          // q must be the midpoint of a chord (p, r).
          for (int r : tri_->vertex_neighbors(q)) {
            if (r == p) continue;
            const double span = dist(tri_->pos[p], tri_->pos[r]);
            if (dist(tri_->pos[q], midpoint(tri_->pos[p], tri_->pos[r])) >
                1e-9 * span)
              continue;
            const double t_cop = 2.0 * tau_[q] - tau_[r];
            if (t_cop <= t_old || t_cop >= t_new) continue;
            if (t_cop - t_old >= policy_.coplanar_cutoff * free_height) {
              t_new = t_cop;
              binding = "coplanarity";
            }
          }
        }
      }
    }

    if (!(t_new > t_old))
      throw TpError(ErrorCode::StuckFront, "no positive progress possible");

    const Patch patch = triangulate_tent(front(), p, t_new);
    MockSolver::Evaluation eval;
    if (adaptive_modes()) eval = solver_.evaluate(patch);

    if (!eval.accepted) {
      apply_refinement(eval.refine_tris);
      continue;
    }

    tau_[p] = t_new;
    commit_patch(patch, p, t_new, binding);
    if (policy_.pitch_audit) policy_.pitch_audit(p, t_old, t_new, *tri_);
    for (int t : eval.coarsenable_tris)
      if (tri_->is_leaf(t)) tri_->tris[t].coarsenable = true;
    refresh_hierarchy_after_pitch(p);

    if (conforming()) {
      const std::vector<int> merged = coarsen_scheduler(
          *tri_, tau_, targets_, 1e-9 * std::max(1.0, policy_.target_time));
      for (int s : merged) log("coarsen", s, tau_[s], tau_[s], "cluster", -1);
      if (!merged.empty() && nonlocal_modes()) rebuild_hierarchy();
    } else if (adaptive_modes()) {
      try_coarsen_after_step();
    }

    assert_step_invariants(p, t_old, t_new);
  }

  report_.steps = iterations;
  report_.mean_aspect = aspect_count_ ? aspect_sum_ / aspect_count_ : 0.0;
  report_.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  RunResult result;
  result.mesh = std::move(stmesh_);
  result.report = report_;
  result.events = std::move(events_);
  return result;
}

FlipOutcome spacetime_flip(FrontTriangulation& tri, std::vector<double>& tau,
                           int d0, int d1, const WavespeedField& field,
                           AdaptLog& log) {
  FlipOutcome out;
  const auto shared = tri.edge_leaves(d0, d1);
  if (shared[0] < 0 || shared[1] < 0) return out;
  int oa = -1, ob = -1;
  for (int i = 0; i < 3; ++i) {
    if (tri.tris[shared[0]].v[i] != d0 && tri.tris[shared[0]].v[i] != d1)
      oa = tri.tris[shared[0]].v[i];
    if (tri.tris[shared[1]].v[i] != d0 && tri.tris[shared[1]].v[i] != d1)
      ob = tri.tris[shared[1]].v[i];
  }
  // Coplanarity: the quad's lift is planar iff the diagonal heights agree
  // with the plane through three of its corners.
  const Vec2 pd0 = tri.pos[d0], pd1 = tri.pos[d1];
  const Vec2 pa = tri.pos[oa], pb = tri.pos[ob];
  const double det = (pd1 - pd0).cross(pa - pd0);
  bool coplanar = false;
  if (det != 0.0) {
    const Vec2 r = pb - pd0;
    const double u = r.cross(pa - pd0) / det;
    const double w = (pd1 - pd0).cross(r) / det;
    const double t_plane =
        tau[d0] + u * (tau[d1] - tau[d0]) + w * (tau[oa] - tau[d0]);
    const double scale = std::max({std::abs(tau[d0]), std::abs(tau[d1]),
                                   std::abs(tau[oa]), std::abs(tau[ob]), 1.0});
    coplanar = std::abs(t_plane - tau[ob]) <= 1e-9 * scale;
  }
  if (!coplanar) {
    // The spacetime tetrahedron must have positive volume and all four
    // facets causal.
    Front f(std::make_shared<FrontTriangulation>(tri), tau);
    const std::array<std::array<int, 3>, 4> facets = {
        std::array<int, 3>{d0, oa, d1}, {d0, d1, ob}, {d0, oa, ob},
        {d1, oa, ob}};
    for (const auto& fc : facets) {
      const TriangleShape shape{tri.pos[fc[0]], tri.pos[fc[1]], tri.pos[fc[2]]};
      if (shape.degenerate()) return out;
      const std::array<double, 3> ft = {tau[fc[0]], tau[fc[1]], tau[fc[2]]};
      const double g = gradient_of(shape, ft);
      if (g >= field.min_slope_over(spacetime_triangle(shape, ft)))
        return out;
    }
  }
  Patch patch;
  if (!coplanar) {
    Front f(std::make_shared<FrontTriangulation>(tri), tau);
    patch = flip_patch(f, d0, d1, oa, ob);
  }
  const FlipStatus status = tri.flip_edge(d0, d1, log);
  out.status = status;
  if (status != FlipStatus::Ok) return out;
  if (!coplanar) {
    out.has_patch = true;
    out.patch = std::move(patch);
  }
  return out;
}

std::vector<int> coarsen_region(FrontTriangulation& tri,
                                std::vector<double>& tau, double coplanar_tol,
                                AdaptLog& log) {
  std::vector<int> removed;
  // Transient triangles created by unlocking flips belong to the marked
  // region and stay mergeable.
  auto marked = [&tri](int t) {
    return tri.tris[t].coarsenable || tri.tris[t].via_flip;
  };
  bool progress = true;
  while (progress) {
    progress = false;
    // Plain de-refinements first.
    for (int t : tri.leaves()) {
      const auto& node = tri.tris[t];
      if (!marked(t) || node.level == 0) continue;
      const int s = node.v[0];
      if (!tri.valive[s] || tri.vlevel[s] == 0) continue;
      bool all = true;
      for (int u : tri.leaves_at_vertex(s))
        if (!marked(u)) all = false;
      if (!all) continue;
      CoarsenResult r = tri.derefine(t, tau, coplanar_tol);
      if (r.status == CoarsenStatus::Ok) {
        for (int p : r.revived) tri.tris[p].coarsenable = true;
        removed.insert(removed.end(), r.removed_vertices.begin(),
                       r.removed_vertices.end());
        progress = true;
        break;
      }
    }
    if (progress) continue;
    // Loop case: no degree-4 vertex among the marked region; an edge flip
    // between two coarsenable leaves can create one.
    for (int t : tri.leaves()) {
      if (!marked(t)) continue;
      const std::array<int, 3> verts = tri.tris[t].v;  // tris may reallocate
      bool done = false;
      for (int i = 0; i < 3 && !done; ++i) {
        const int a = verts[i];
        const int b = verts[(i + 1) % 3];
        const auto pair = tri.edge_leaves(a, b);
        const int other = (pair[0] == t) ? pair[1] : pair[0];
        if (other < 0 || !marked(other)) continue;
        int oa = -1, ob = -1;  // the new diagonal, needed to undo the flip
        for (int k = 0; k < 3; ++k) {
          if (tri.tris[pair[0]].v[k] != a && tri.tris[pair[0]].v[k] != b)
            oa = tri.tris[pair[0]].v[k];
          if (tri.tris[pair[1]].v[k] != a && tri.tris[pair[1]].v[k] != b)
            ob = tri.tris[pair[1]].v[k];
        }
        AdaptLog trial_log;
        if (tri.flip_edge(a, b, trial_log) != FlipStatus::Ok) continue;
        // The flip is acceptable only if some vertex now de-refines.
        bool used = false;
        for (int cand : {a, b}) {
          if (!tri.valive[cand] || tri.vlevel[cand] == 0) continue;
          const std::vector<int> around = tri.leaves_at_vertex(cand);
          if (around.empty()) continue;
          for (int u : around) tri.tris[u].coarsenable = true;
          CoarsenResult r = tri.derefine(around[0], tau, coplanar_tol);
          if (r.status == CoarsenStatus::Ok) {
            for (int p : r.revived) tri.tris[p].coarsenable = true;
            removed.insert(removed.end(), r.removed_vertices.begin(),
                           r.removed_vertices.end());
            used = true;
            break;
          }
        }
        if (used) {
          log.insert(log.end(), trial_log.begin(), trial_log.end());
          progress = true;
          done = true;
        } else {
          AdaptLog undo;
          tri.flip_edge(oa, ob, undo);  // flip the new diagonal back
        }
      }
      if (done) break;
    }
  }
  return removed;
}

}  // namespace tentpitcher
