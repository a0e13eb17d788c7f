#include "tentpitcher/triangulation.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <cmath>
#include <set>

namespace tentpitcher {

FrontTriangulation FrontTriangulation::from_space_mesh(const SpaceMesh& mesh) {
  FrontTriangulation ft;
  ft.dim = mesh.dim;
  ft.pos = mesh.vertices;
  ft.vboundary = mesh.boundary;
  if (ft.vboundary.size() != ft.pos.size())
    ft.vboundary.assign(ft.pos.size(), false);
  ft.vlevel.assign(ft.pos.size(), 0);
  ft.valive.assign(ft.pos.size(), true);
  ft.vtris_.assign(ft.pos.size(), {});
  for (size_t c = 0; c < mesh.cells.size(); ++c) {
    TriNode node;
    if (mesh.dim == 1) {
      node.v = {mesh.cells[c][0], mesh.cells[c][1], -1};
    } else {
      const int a = mesh.apex.empty() ? 0 : mesh.apex[c];
      node.v = {mesh.cells[c][a], mesh.cells[c][(a + 1) % 3],
                mesh.cells[c][(a + 2) % 3]};
    }
    node.level = 0;
    ft.tris.push_back(node);
    const int id = static_cast<int>(c);
    ft.by_verts_[ft.sorted_verts(id)] = id;
    ft.link_leaf(id);
  }
  return ft;
}

std::vector<int> FrontTriangulation::leaves() const {
  std::vector<int> out;
  for (size_t t = 0; t < tris.size(); ++t)
    if (tris[t].alive) out.push_back(static_cast<int>(t));
  return out;
}

std::array<int, 2> FrontTriangulation::edge_leaves(int a, int b) const {
  std::array<int, 2> out{-1, -1};
  int k = 0;
  for (int t : vtris_[a]) {
    bool has_b = false;
    for (int i = 0; i < cell_size(); ++i)
      if (tris[t].v[i] == b) has_b = true;
    if (has_b && k < 2) out[k++] = t;
  }
  return out;
}

int FrontTriangulation::leaf_containing(const Vec2& x) const {
  for (size_t t = 0; t < tris.size(); ++t) {
    if (!tris[t].alive) continue;
    const TriangleShape s = shape(static_cast<int>(t));
    const double orient = signed_area2(s.v[0], s.v[1], s.v[2]);
    const double a0 = signed_area2(s.v[0], s.v[1], x);
    const double a1 = signed_area2(s.v[1], s.v[2], x);
    const double a2 = signed_area2(s.v[2], s.v[0], x);
    if ((a0 >= 0) == (orient >= 0) && (a1 >= 0) == (orient >= 0) &&
        (a2 >= 0) == (orient >= 0))
      return static_cast<int>(t);
  }
  return -1;
}

std::vector<int> FrontTriangulation::vertex_neighbors(int v) const {
  std::set<int> nb;
  for (int t : vtris_[v])
    for (int i = 0; i < cell_size(); ++i)
      if (tris[t].v[i] != v) nb.insert(tris[t].v[i]);
  return {nb.begin(), nb.end()};
}

int FrontTriangulation::max_vertex_degree() const {
  int d = 0;
  for (size_t v = 0; v < pos.size(); ++v)
    if (valive[v] && !vtris_[v].empty())
      d = std::max(d, vertex_degree(static_cast<int>(v)));
  return d;
}

int FrontTriangulation::new_vertex(const Vec2& p, bool bnd, int level) {
  pos.push_back(p);
  vboundary.push_back(bnd);
  vlevel.push_back(level);
  valive.push_back(true);
  vtris_.push_back({});
  return static_cast<int>(pos.size()) - 1;
}

int FrontTriangulation::new_node(int apex, int b, int c, int parent, int level,
                                 bool via_flip) {
  TriNode node;
  node.v = {apex, b, c};
  node.parent = parent;
  node.level = level;
  node.via_flip = via_flip;
  tris.push_back(node);
  const int id = static_cast<int>(tris.size()) - 1;
  by_verts_[sorted_verts(id)] = id;
  return id;
}

std::array<int, 3> FrontTriangulation::sorted_verts(int t) const {
  std::array<int, 3> s = tris[t].v;
  std::sort(s.begin(), s.end());
  return s;
}

void FrontTriangulation::link_leaf(int t) {
  tris[t].alive = true;
  ++leaf_count_;
  for (int i = 0; i < cell_size(); ++i) vtris_[tris[t].v[i]].push_back(t);
}

void FrontTriangulation::unlink_leaf(int t) {
  tris[t].alive = false;
  --leaf_count_;
  for (int i = 0; i < cell_size(); ++i) {
    auto& list = vtris_[tris[t].v[i]];
    list.erase(std::remove(list.begin(), list.end(), t), list.end());
  }
}

void FrontTriangulation::revive(int t) { link_leaf(t); }
void FrontTriangulation::kill(int t) { unlink_leaf(t); }

// Splits leaf L along the segment from the midpoint m of edge (x, y) to the
// opposite vertex.  The child containing L's base keeps that base as its
// own.  Marks L dirty when (x, y) is not L's base.
int FrontTriangulation::split_leaf_on_edge(int t, int x, int y, int m,
                                           AdaptLog& log) {
  int o = -1;
  for (int i = 0; i < 3; ++i)
    if (tris[t].v[i] != x && tris[t].v[i] != y) o = tris[t].v[i];
  const bool proper = (o == tris[t].v[0]);
  const int level = tris[t].level;
  unlink_leaf(t);
  const int c0 = new_node(m, y, o, t, level + 1, false);
  const int c1 = new_node(m, o, x, t, level + 1, false);
  tris[t].child = {c0, c1};
  if (!proper) tris[t].dirty = true;
  link_leaf(c0);
  link_leaf(c1);
  log.push_back({AdaptOp::Bisect, t, {x, y}, m});
  return c0;
}

int FrontTriangulation::bisect_triangle(int t, std::vector<double>& tau,
                                        AdaptLog& log) {
  if (dim != 2)
    throw TpError(ErrorCode::InvalidArgument, "bisect_triangle: 2D only");
  if (!tris[t].alive)
    throw TpError(ErrorCode::NotALeaf, "bisect_triangle: not a leaf");
  const int x = tris[t].v[1];
  const int y = tris[t].v[2];
  const auto shared = edge_leaves(x, y);
  const int n = (shared[0] == t) ? shared[1] : shared[0];
  const int m = new_vertex(midpoint(pos[x], pos[y]), n < 0, tris[t].level + 1);
  tau.push_back((tau[x] + tau[y]) / 2.0);
  split_leaf_on_edge(t, x, y, m, log);
  if (n >= 0) split_leaf_on_edge(n, x, y, m, log);
  return m;
}

void FrontTriangulation::refine_and_propagate(int t, std::vector<double>& tau,
                                              AdaptLog& log, bool lazy) {
  const int x = tris[t].v[1];
  const int y = tris[t].v[2];
  const auto shared = edge_leaves(x, y);
  const int n = (shared[0] == t) ? shared[1] : shared[0];
  const int n_parent = (n >= 0) ? tris[n].parent : -1;
  const bool n_transient = n >= 0 && n_parent >= 0 && tris[n_parent].dirty;
  bisect_triangle(t, tau, log);
  if (n < 0) return;
  if (n_transient) {
    // The neighbor was a temporary child; its parent now has height two
    // and is cleaned at once regardless of propagation mode.
    cleanup2(n_parent, tau, log);
  } else if (tris[n].dirty && !lazy) {
    cleanup1(n, tau, log, false);
  }
}

AdaptLog FrontTriangulation::refine_earnest(int t, std::vector<double>& tau) {
  if (!tris[t].alive)
    throw TpError(ErrorCode::NotALeaf, "refine_earnest: not a leaf");
  AdaptLog log;
  refine_and_propagate(t, tau, log, false);
  return log;
}

AdaptLog FrontTriangulation::refine_lazy(int t, std::vector<double>& tau) {
  if (!tris[t].alive)
    throw TpError(ErrorCode::NotALeaf, "refine_lazy: not a leaf");
  AdaptLog log;
  if (has_dirty_parent(t)) {
    // The leaf is transient; clean its region first, then refine the leaf
    // that now covers it.
    const TriangleShape s = shape(t);
    const Vec2 centroid = (s.v[0] + s.v[1] + s.v[2]) / 3.0;
    cleanup1(tris[t].parent, tau, log, true);
    const int t2 = leaf_containing(centroid);
    if (t2 >= 0) refine_and_propagate(t2, tau, log, true);
  } else {
    refine_and_propagate(t, tau, log, true);
  }
  return log;
}

AdaptLog FrontTriangulation::cleanup_before_pitching(int p,
                                                     std::vector<double>& tau) {
  AdaptLog log;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int t : vtris_[p]) {
      if (has_dirty_parent(t)) {
        cleanup1(tris[t].parent, tau, log, true);
        changed = true;
        break;
      }
    }
  }
  return log;
}

bool FrontTriangulation::any_dirty() const {
  for (const auto& node : tris)
    if (node.dirty) return true;
  return false;
}

void FrontTriangulation::cleanup1(int parent, std::vector<double>& tau,
                                  AdaptLog& log, bool lazy) {
  const int c0 = tris[parent].child[0];
  const int c1 = tris[parent].child[1];
  if (tris[c0].is_internal() || tris[c1].is_internal()) {
    cleanup2(parent, tau, log);
    return;
  }
  const bool c0_base =
      (tris[c0].v[1] == tris[parent].v[1] || tris[c0].v[1] == tris[parent].v[2]) &&
      (tris[c0].v[2] == tris[parent].v[1] || tris[c0].v[2] == tris[parent].v[2]);
  const int c_far = c0_base ? c0 : c1;
  const int c_near = c0_base ? c1 : c0;
  const int s = tris[c_far].v[0];
  int o = -1;
  for (int i = 1; i < 3; ++i)
    if (tris[c_near].v[i] != tris[parent].v[0]) o = tris[c_near].v[i];
  refine_and_propagate(c_far, tau, log, lazy);
  log.push_back({AdaptOp::Flip, parent, {o, s}, -1});
  rebuild_nvb(parent);
}

void FrontTriangulation::cleanup2(int parent, std::vector<double>& tau,
                                  AdaptLog& log) {
  const int c0 = tris[parent].child[0];
  const int c1 = tris[parent].child[1];
  const bool c0_base =
      (tris[c0].v[1] == tris[parent].v[1] || tris[c0].v[1] == tris[parent].v[2]) &&
      (tris[c0].v[2] == tris[parent].v[1] || tris[c0].v[2] == tris[parent].v[2]);
  const int c_far = c0_base ? c0 : c1;
  const int c_near = c0_base ? c1 : c0;
  const int s = tris[c_far].v[0];
  int o = -1;
  for (int i = 1; i < 3; ++i)
    if (tris[c_near].v[i] != tris[parent].v[0]) o = tris[c_near].v[i];
  if (tris[c_near].alive) {
    // c_far already subdivided: a single flip restores bisection order.
    log.push_back({AdaptOp::Flip, parent, {o, s}, -1});
  } else {
    // c_near subdivided: one bisection of c_far plus two flips.
    const int t_vertex = tris[tris[c_near].child[0]].v[0];
    refine_and_propagate(c_far, tau, log, false);
    log.push_back({AdaptOp::Flip, parent, {o, s}, -1});
    log.push_back({AdaptOp::Flip, parent, {s, t_vertex}, -1});
  }
  rebuild_nvb(parent);
}

// Rewrites the region below a dirty parent into newest-vertex form at the
// correct levels; the temporary split nodes die.
void FrontTriangulation::rebuild_nvb(int parent) {
  const int a = tris[parent].v[0];
  const int b = tris[parent].v[1];
  const int c = tris[parent].v[2];
  const int c0 = tris[parent].child[0];
  const bool c0_base = (tris[c0].v[1] == b || tris[c0].v[1] == c) &&
                       (tris[c0].v[2] == b || tris[c0].v[2] == c);
  const int c_far = c0_base ? c0 : tris[parent].child[1];
  const int c_near = c0_base ? tris[parent].child[1] : c0;
  const int s = tris[c_far].v[0];
  int o = -1;
  for (int i = 1; i < 3; ++i)
    if (tris[c_near].v[i] != a) o = tris[c_near].v[i];
  const int w = (o == b) ? c : b;  // s lies on edge (a, w)

  assert(tris[c_far].is_internal());
  const int m = tris[tris[c_far].child[0]].v[0];
  int t_vertex = -1;
  if (tris[c_near].is_internal())
    t_vertex = tris[tris[c_near].child[0]].v[0];

  for (int child : {c_far, c_near}) {
    if (tris[child].alive) {
      kill(child);
    } else {
      for (int g : tris[child].child)
        if (g >= 0 && tris[g].alive) kill(g);
    }
  }

  const int lvl = tris[parent].level;
  const int n1 = new_node(m, c, a, parent, lvl + 1, false);
  const int n2 = new_node(m, a, b, parent, lvl + 1, false);
  tris[parent].child = {n1, n2};
  tris[parent].dirty = false;

  auto subdivide = [&](int node, int mid) {
    const int apex = tris[node].v[0];
    const int nb = tris[node].v[1];
    const int nc = tris[node].v[2];
    const int g0 = new_node(mid, nc, apex, node, lvl + 2, false);
    const int g1 = new_node(mid, apex, nb, node, lvl + 2, false);
    tris[node].child = {g0, g1};
    link_leaf(g0);
    link_leaf(g1);
  };

  const int s_child = (w == c) ? n1 : n2;
  const int other = (s_child == n1) ? n2 : n1;
  subdivide(s_child, s);
  if (t_vertex >= 0) {
    subdivide(other, t_vertex);
  } else {
    link_leaf(other);
  }
}

FlipStatus FrontTriangulation::flip_edge(int d0, int d1, AdaptLog& log) {
  const auto shared = edge_leaves(d0, d1);
  if (shared[0] < 0 || shared[1] < 0) return FlipStatus::FlipRejected;
  const int ta = shared[0], tb = shared[1];
  int oa = -1, ob = -1;
  for (int i = 0; i < 3; ++i) {
    if (tris[ta].v[i] != d0 && tris[ta].v[i] != d1) oa = tris[ta].v[i];
    if (tris[tb].v[i] != d0 && tris[tb].v[i] != d1) ob = tris[tb].v[i];
  }
  const double s1 = signed_area2(pos[d0], pos[d1], pos[oa]);
  const double s2 = signed_area2(pos[d0], pos[d1], pos[ob]);
  const double s3 = signed_area2(pos[oa], pos[ob], pos[d0]);
  const double s4 = signed_area2(pos[oa], pos[ob], pos[d1]);
  if (s1 * s2 >= 0.0 || s3 * s4 >= 0.0) return FlipStatus::FlipRejected;

  const bool mark = tris[ta].coarsenable && tris[tb].coarsenable;
  unlink_leaf(ta);
  unlink_leaf(tb);
  const int lvl = std::max(tris[ta].level, tris[tb].level);
  // Reviving a node is allowed when nothing below it is still alive (its
  // pieces were merged or flipped away), so a flip that recreates an old
  // triangle restores the old forest node.
  std::function<bool(int)> subtree_clear = [&](int n) {
    if (tris[n].alive) return false;
    for (int c : tris[n].child)
      if (c >= 0 && !subtree_clear(c)) return false;
    return true;
  };
  for (const std::array<int, 3>& verts :
       {std::array<int, 3>{d0, oa, ob}, std::array<int, 3>{d1, oa, ob}}) {
    std::array<int, 3> key = verts;
    std::sort(key.begin(), key.end());
    auto it = by_verts_.find(key);
    if (it != by_verts_.end() && subtree_clear(it->second)) {
      revive(it->second);
      tris[it->second].coarsenable = mark;
    } else {
      const int id = new_node(verts[0], verts[1], verts[2], -1, lvl, true);
      link_leaf(id);
      tris[id].coarsenable = mark;
    }
  }
  log.push_back({AdaptOp::Flip, ta, {d0, d1}, -1});
  return FlipStatus::Ok;
}

std::optional<int> FrontTriangulation::merge_pair(int la, int lb, int s) {
  if (tris[la].parent >= 0 && tris[la].parent == tris[lb].parent)
    return tris[la].parent;
  std::set<int> verts;
  for (int i = 0; i < 3; ++i) {
    verts.insert(tris[la].v[i]);
    verts.insert(tris[lb].v[i]);
  }
  verts.erase(s);
  if (verts.size() != 3) return std::nullopt;
  std::array<int, 3> key{};
  std::copy(verts.begin(), verts.end(), key.begin());
  auto it = by_verts_.find(key);
  if (it == by_verts_.end() || tris[it->second].alive) return std::nullopt;
  return it->second;
}

CoarsenResult FrontTriangulation::derefine(int t, const std::vector<double>& tau,
                                           double coplanar_tol) {
  CoarsenResult result;
  if (!tris[t].alive) {
    result.status = CoarsenStatus::RejectedNotALeaf;
    return result;
  }
  return derefine_at(tris[t].v[0], tau, coplanar_tol);
}

CoarsenResult FrontTriangulation::derefine_at(int s,
                                              const std::vector<double>& tau,
                                              double tol) {
  CoarsenResult result;
  if (s < 0 || !valive[s] || vlevel[s] == 0) {
    result.status = CoarsenStatus::RejectedNoParent;
    return result;
  }
  const std::vector<int> around = vtris_[s];
  const std::vector<int> nbrs = vertex_neighbors(s);
  const bool interior = !vboundary[s];
  if ((interior && (around.size() != 4 || nbrs.size() != 4)) ||
      (!interior && (around.size() != 2 || nbrs.size() != 3))) {
    result.status = CoarsenStatus::RejectedDegree;
    return result;
  }

  // Find the neighbor pair (q, r) whose edge s bisected.
  int q = -1, r = -1;
  for (size_t i = 0; i < nbrs.size() && q < 0; ++i) {
    for (size_t j = i + 1; j < nbrs.size(); ++j) {
      const Vec2 mid = midpoint(pos[nbrs[i]], pos[nbrs[j]]);
      const double span = dist(pos[nbrs[i]], pos[nbrs[j]]);
      if (dist(pos[s], mid) <= 1e-9 * std::max(span, 1e-300)) {
        q = nbrs[i];
        r = nbrs[j];
        break;
      }
    }
  }
  if (q < 0) {
    result.status = CoarsenStatus::RejectedDegree;
    return result;
  }
  if (std::abs(tau[s] - (tau[q] + tau[r]) / 2.0) > tol) {
    result.status = CoarsenStatus::RejectedCoplanarity;
    return result;
  }

  std::vector<std::pair<int, int>> pairs;
  if (interior) {
    for (int n : nbrs) {
      if (n == q || n == r) continue;
      std::vector<int> pair;
      for (int t : around)
        for (int i = 0; i < 3; ++i)
          if (tris[t].v[i] == n) pair.push_back(t);
      if (pair.size() != 2) {
        result.status = CoarsenStatus::RejectedDegree;
        return result;
      }
      pairs.emplace_back(pair[0], pair[1]);
    }
  } else {
    pairs.emplace_back(around[0], around[1]);
  }

  std::vector<int> parents;
  for (const auto& [la, lb] : pairs) {
    const auto parent = merge_pair(la, lb, s);
    if (!parent) {
      result.status = CoarsenStatus::RejectedNoParent;
      return result;
    }
    parents.push_back(*parent);
  }

  for (const auto& [la, lb] : pairs) {
    kill(la);
    kill(lb);
  }
  for (int p : parents) {
    revive(p);
    result.revived.push_back(p);
  }
  valive[s] = false;
  result.removed_vertices.push_back(s);

  for (int p : parents) {
    if (!tris[p].alive) continue;  // merged away by an earlier recursion
    const int gp = tris[p].parent;
    if (gp >= 0 && tris[gp].coarsenable) {
      CoarsenResult up = derefine(p, tau, tol);
      if (up.status == CoarsenStatus::Ok) {
        result.revived.insert(result.revived.end(), up.revived.begin(),
                              up.revived.end());
        result.removed_vertices.insert(result.removed_vertices.end(),
                                       up.removed_vertices.begin(),
                                       up.removed_vertices.end());
      }
    }
  }
  return result;
}

std::array<double, 4> FrontTriangulation::shape_key(int t) const {
  const Vec2 a = pos[tris[t].v[0]];
  Vec2 u = pos[tris[t].v[1]] - a;
  Vec2 w = pos[tris[t].v[2]] - a;
  if (u.x > w.x || (u.x == w.x && u.y > w.y)) std::swap(u, w);
  const double s = u.norm();
  return {u.x / s, u.y / s, w.x / s, w.y / s};
}

int FrontTriangulation::root_of(int t) const {
  int n = t;
  while (tris[n].parent >= 0) n = tris[n].parent;
  return n;
}

int FrontTriangulation::homothety_class(int t) {
  for (int n = t; n >= 0; n = tris[n].parent)
    if (tris[n].via_flip)
      throw TpError(ErrorCode::ClassUndefined,
                    "homothety_class: flip in ancestry");
  const int root = root_of(t);
  auto& catalog = class_catalog_[sorted_verts(root)];
  if (catalog.empty()) catalog.push_back(shape_key(root));
  const auto key = shape_key(t);
  for (size_t i = 0; i < catalog.size(); ++i) {
    bool match = true;
    for (int k = 0; k < 4; ++k)
      if (std::abs(catalog[i][k] - key[k]) > 1e-7) match = false;
    if (match) return static_cast<int>(i);
  }
  catalog.push_back(key);
  return static_cast<int>(catalog.size()) - 1;
}

}  // namespace tentpitcher
