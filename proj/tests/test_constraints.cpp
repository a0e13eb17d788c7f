#include <doctest.h>

#include "tentpitcher/constraints.hpp"
#include "test_support.hpp"

using namespace tentpitcher;
using namespace test_support;

namespace {

// Bisection oracle: largest t such that pred holds on [lo, hi).
double bisect_sup(double lo, double hi, const std::function<bool(double)>& ok) {
  REQUIRE(ok(lo));
  REQUIRE(!ok(hi));
  for (int i = 0; i < 100; ++i) {
    const double mid = lo + (hi - lo) / 2;
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

// Restated adaptive progress constraint in terms of sines of angles of the
// triangle and its children (independent reimplementation for the
// equivalence test).
bool adaptive_restatement(const TriangleShape& t, const std::array<double, 3>& tau,
                          double S, double eps, double f) {
  const Vec2 a = t.v[0], b = t.v[1], c = t.v[2];
  const Vec2 d = midpoint(b, c);
  const double td = (tau[1] + tau[2]) / 2;
  auto grad = [](const Vec2& x, const Vec2& y, double tx, double ty) {
    return std::abs(ty - tx) / dist(x, y);
  };
  const double g_ab = grad(a, b, tau[0], tau[1]);
  const double g_ad = grad(a, d, tau[0], td);
  const double g_ac = grad(a, c, tau[0], tau[2]);
  const double g_bc = grad(b, c, tau[1], tau[2]);
  const double k = 2 * (1 - f);
  const double bound_ab = std::min({(1 - eps) * std::sin(angle_at(b, a, c)),
                                    k * std::sin(angle_at(b, a, d)),
                                    k * std::sin(angle_at(a, b, c))}) * S;
  const double bound_ad = std::min({(1 - eps) * std::sin(angle_at(a, d, c)),
                                    k * std::sin(angle_at(d, a, c)),
                                    k * std::sin(angle_at(d, a, b))}) * S;
  const double bound_ac = std::min({(1 - eps) * std::sin(angle_at(b, a, c)),
                                    k * std::sin(angle_at(a, c, b)),
                                    k * std::sin(angle_at(d, a, c))}) * S;
  const double bound_bc = std::min({(1 - eps) * std::sin(angle_at(b, d, a)),
                                    k * std::sin(angle_at(a, c, b)),
                                    k * std::sin(angle_at(a, b, c))}) * S;
  return g_ab <= bound_ab && g_ad <= bound_ad && g_ac <= bound_ac &&
         g_bc <= bound_bc;
}

}  // namespace

TEST_CASE("constraint parameter chain") {
  ConstraintParams p = ConstraintParams::with_epsilon(0.5);
  CHECK_NOTHROW(p.validate());
  CHECK(p.phi_bar > p.epsilon);
  CHECK(p.phi_bar < (1 + p.epsilon) / 2);
  for (double e : {0.25, 0.5, 0.75})
    CHECK_NOTHROW(ConstraintParams::with_epsilon(e).validate());
  p.phi_bar = p.epsilon;  // violates epsilon < phi_bar
  CHECK_THROWS_AS(p.validate(), TpError);
}

TEST_CASE("causal sup 1d") {
  SpaceMesh line = line_mesh({0, 1});
  Front f = flat_front(line);
  auto unit = [](int) { return 1.0; };
  CHECK(causal_sup_1d(f, 0, unit).sup == doctest::Approx(1.0));

  // Two neighbors giving 1.0 and 0.4: the min binds.
  SpaceMesh chain = line_mesh({0, 1, 1.4});
  Front g = flat_front(chain);
  CHECK(causal_sup_1d(g, 1, unit).sup == doctest::Approx(0.4));
}

TEST_CASE("causal sup 1d matches bisection on random chains") {
  Rng rng(17);
  const WavespeedField field = WavespeedField::constant(1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> xs = {0.0};
    for (int i = 0; i < 6; ++i) xs.push_back(xs.back() + 0.2 + rng.uniform());
    SpaceMesh mesh = line_mesh(xs);
    Front f = flat_front(mesh);
    // Random causal front.
    for (size_t i = 1; i < xs.size(); ++i)
      f.tau[i] = f.tau[i - 1] + (xs[i] - xs[i - 1]) * rng.uniform(-0.9, 0.9);
    REQUIRE(is_causal(f, field));
    for (int p : local_minima(f)) {
      const double sup = causal_sup_1d(f, p, [](int) { return 1.0; }).sup;
      const double oracle = bisect_sup(f.tau[p], f.tau[p] + 10.0, [&](double t) {
        Front lifted = f;
        lifted.tau[p] = t;
        bool ok = true;
        for (int leaf : f.tri->leaves_at_vertex(p))
          ok = ok && gradient_mag(lifted, leaf) < 1.0;
        return ok;
      });
      CHECK(sup == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("causal sup 2d closed form vs bisection oracle") {
  SpaceMesh mesh = single_triangle({{0, 0}, {1, 0}, {0, 1}});
  Front f = flat_front(mesh);
  int p = -1;
  for (size_t v = 0; v < f.tau.size(); ++v)
    if (f.tri->pos[v].x == 0 && f.tri->pos[v].y == 0) p = static_cast<int>(v);

  for (double S : {1.0, 2.0}) {
    const double sup = causal_sup_2d(f, p, 0, S).sup;
    CHECK(sup == doctest::Approx(S * std::sqrt(2.0) / 2).epsilon(1e-12));
    const double oracle = bisect_sup(0.0, 10.0, [&](double t) {
      Front lifted = f;
      lifted.tau[p] = t;
      return gradient_mag(lifted, 0) < S;
    });
    CHECK(sup == doctest::Approx(oracle).epsilon(1e-9));
  }

  // Opposite edge already at the causality boundary.
  Front g = flat_front(mesh);
  int q = -1, r = -1;
  for (size_t v = 0; v < g.tau.size(); ++v) {
    if (g.tri->pos[v].x == 1) q = static_cast<int>(v);
    if (g.tri->pos[v].y == 1) r = static_cast<int>(v);
  }
  g.tau[r] = dist(g.tri->pos[q], g.tri->pos[r]) * 1.0;
  CHECK_THROWS_AS(causal_sup_2d(g, p, 0, 1.0), TpError);
}

TEST_CASE("causal sup 2d matches bisection on random triangles") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const TriangleShape t = random_triangle(rng);
    SpaceMesh mesh = single_triangle(t);
    Front f = flat_front(mesh);
    const double S = 0.5 + rng.uniform();
    // Lowest vertex 0 in stored order; give the others a causal spread.
    const int a = f.tri->tris[0].v[0];
    const int b = f.tri->tris[0].v[1];
    const int c = f.tri->tris[0].v[2];
    f.tau[b] = 0.0;
    f.tau[c] = rng.uniform(0, 0.9) * S *
               dist(f.tri->pos[b], f.tri->pos[c]);
    f.tau[a] = 0.0;
    const double sup = causal_sup_2d(f, a, 0, S).sup;
    // Bracket the oracle from the foot value, where the plane gradient
    // equals the opposite-edge gradient and is surely below S.
    const Vec2 foot =
        foot_of_perpendicular(f.tri->pos[a], f.tri->pos[b], f.tri->pos[c]);
    const Vec2 d = f.tri->pos[c] - f.tri->pos[b];
    const double sfoot = (foot - f.tri->pos[b]).dot(d) / d.norm2();
    const double tau_foot = f.tau[b] + sfoot * (f.tau[c] - f.tau[b]);
    const double oracle = bisect_sup(tau_foot, tau_foot + 100.0, [&](double tt) {
      Front lifted = f;
      lifted.tau[a] = tt;
      return gradient_mag(lifted, 0) < S;
    });
    CHECK(sup == doctest::Approx(oracle).epsilon(1e-9));
    // Monotone in S.
    CHECK(causal_sup_2d(f, a, 0, S + 0.5).sup >= sup - 1e-12);
  }
}

TEST_CASE("progress sup 2d") {
  // Unit right triangle with the right angle at p; phi = 1 on both edges.
  SpaceMesh mesh = single_triangle({{0, 0}, {1, 0}, {0, 1}});
  Front f = flat_front(mesh);
  int p = -1;
  for (size_t v = 0; v < f.tau.size(); ++v)
    if (f.tri->pos[v].x == 0 && f.tri->pos[v].y == 0) p = static_cast<int>(v);
  const HeightBound hb = progress_sup_2d(f, p, 0, 1.0, 0.5);
  CHECK(hb.sup == doctest::Approx(0.5));

  // After advancing to the sup, the progress constraint still holds.
  Front lifted = f;
  lifted.tau[p] = hb.sup;
  CHECK(satisfies_progress(lifted, 0, 1.0, 0.5));

  // epsilon -> 0 recovers min(tau(q) + S|pq|, tau(r) + S|pr|).
  const double loose = progress_sup_2d(f, p, 0, 1.0, 1e-12).sup;
  CHECK(loose == doctest::Approx(1.0).epsilon(1e-9));

  // An obtuse triangle shrinks the bound through the phi factors.
  const double c = std::cos(M_PI / 3), s = std::sin(M_PI / 3);
  SpaceMesh obtuse = single_triangle({{0, 0}, {c, s}, {c, -s}});
  Front g = flat_front(obtuse);
  int apex = -1;
  for (size_t v = 0; v < g.tau.size(); ++v)
    if (g.tri->pos[v].x == 0) apex = static_cast<int>(v);
  const double tight = progress_sup_2d(g, apex, 0, 1.0, 0.5).sup;
  // Edges from the apex have length 1 and carry the obtuse angle.
  CHECK(tight == doctest::Approx(0.5 * std::sin(2 * M_PI / 3)));
  CHECK(tight < 0.5);
}

TEST_CASE("satisfies_progress") {
  SpaceMesh mesh = single_triangle({{0, 0}, {1, 0}, {0, 1}});
  Front f = flat_front(mesh);
  CHECK(satisfies_progress(f, 0, 1.0, 0.5));  // constant front

  // Gradient exactly at the bound: non-strict inequality accepts it.  The
  // apex sits strictly lowest so only the opposite edge is checked, and
  // tau(q) = 0 keeps the edge difference bitwise equal to the bound.
  const auto& node = f.tri->tris[0];
  const TriangleShape shape = f.tri->shape(0);
  Front g = f;
  const int q = node.v[1], r = node.v[2];
  const double len = dist(f.tri->pos[q], f.tri->pos[r]);
  g.tau[node.v[0]] = -1.0;
  g.tau[q] = 0.0;
  g.tau[r] = (1 - 0.5) * 1.0 * phi_edge(shape, 0) * len;
  CHECK(satisfies_progress(g, 0, 1.0, 0.5));

  // Random agreement with a direct reimplementation.
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const TriangleShape t = random_triangle(rng);
    SpaceMesh m2 = single_triangle(t);
    Front h = flat_front(m2);
    for (auto& tv : h.tau) tv = rng.uniform();
    const double S = 0.5 + rng.uniform();
    const double eps = 0.1 + 0.8 * rng.uniform();
    const auto& n2 = h.tri->tris[0];
    const TriangleShape s2 = h.tri->shape(0);
    bool oracle = true;
    for (int i = 0; i < 3; ++i) {
      const int vv = n2.v[i], aa = n2.v[(i + 1) % 3], bb = n2.v[(i + 2) % 3];
      if (h.tau[vv] <= h.tau[aa] && h.tau[vv] <= h.tau[bb]) {
        const double grad =
            std::abs(h.tau[bb] - h.tau[aa]) / dist(h.tri->pos[aa], h.tri->pos[bb]);
        if (grad > (1 - eps) * S * phi_edge(s2, i)) oracle = false;
      }
    }
    CHECK(satisfies_progress(h, 0, S, eps) == oracle);
  }
}

TEST_CASE("diminished width") {
  // Equilateral with side 2: all altitudes sqrt(3).
  const TriangleShape eq{{0, 0}, {2, 0}, {1, std::sqrt(3.0)}};
  CHECK(diminished_width(eq, 0.25, 0.5) ==
        doctest::Approx(0.5 * std::sqrt(3.0)));
  CHECK(diminished_width(eq, 0.25, 0.5) == doctest::Approx(0.8660254).epsilon(1e-6));

  // Scaling homogeneity.
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const TriangleShape t = random_triangle(rng);
    const double s = 0.1 + 5 * rng.uniform();
    TriangleShape scaled;
    for (int i = 0; i < 3; ++i) scaled.v[i] = t.v[i] * s;
    CHECK(diminished_width(scaled, 0.3, 0.55) ==
          doctest::Approx(s * diminished_width(t, 0.3, 0.55)).epsilon(1e-12));
  }

  // With phi_bar just above epsilon the apex term dominates only when the
  // apex altitude is smallest.
  for (int trial = 0; trial < 50; ++trial) {
    const TriangleShape t = random_triangle(rng);
    const double eps = 0.4;
    const double f = eps + 1e-9;
    const double dw = diminished_width(t, eps, f);
    const int argmin = (t.altitude(0) <= t.altitude(1) && t.altitude(0) <= t.altitude(2))
                           ? 0
                           : (t.altitude(1) <= t.altitude(2) ? 1 : 2);
    CHECK(dw == doctest::Approx((1 - (argmin == 0 ? eps : f)) *
                                t.altitude(argmin)).epsilon(1e-6));
  }
}

TEST_CASE("adaptive sup: unit right triangle with apex at p") {
  const TriangleShape shape{{0, 0}, {1, 0}, {0, 1}};
  SpaceMesh mesh = single_triangle(shape);
  // Force apex to the corner regardless of the angle rule.
  mesh.apex = {0};
  Front f = flat_front(mesh);
  ConstraintParams params = ConstraintParams::with_epsilon(0.5);
  const double S = 1.0;

  const HeightBound hb = adaptive_sup_2d(f, 0, 0, S, params);

  // Expected closed form: the three-term bound for the apex-p case.
  const Vec2 p{0, 0}, q{1, 0}, r{0, 1};
  const Vec2 w = midpoint(q, r);
  const double expect =
      std::min({0.0 + 2 * diminished_width({w, r, p}, params.epsilon,
                                           params.phi_bar) * S,
                0.0 + diminished_width({p, q, r}, params.epsilon,
                                       params.phi_bar) * S,
                0.0 + 2 * diminished_width({w, p, q}, params.epsilon,
                                           params.phi_bar) * S});
  CHECK(hb.sup == doctest::Approx(expect).epsilon(1e-12));
  CHECK(hb.sup > 0.0);

  // Post-check: advancing to the sup satisfies the adaptive constraint.
  Front lifted = f;
  lifted.tau[0] = hb.sup;
  CHECK(satisfies_adaptive(lifted, 0, S, params));
  // And just beyond it fails.
  lifted.tau[0] = hb.sup * (1 + 1e-9) + 1e-12;
  CHECK_FALSE(satisfies_adaptive(lifted, 0, S, params));
}

TEST_CASE("adaptive sup positive from constant fronts, all apex cases") {
  Rng rng(51);
  ConstraintParams params = ConstraintParams::with_epsilon(0.4);
  for (int trial = 0; trial < 60; ++trial) {
    const TriangleShape t = random_triangle(rng);
    for (int apex = 0; apex < 3; ++apex) {
      SpaceMesh mesh = single_triangle(t);
      mesh.apex = {apex};
      Front f = flat_front(mesh);
      for (int corner = 0; corner < 3; ++corner) {
        const int p = f.tri->tris[0].v[corner];
        const HeightBound hb = adaptive_sup_2d(f, p, 0, 1.0, params);
        CHECK(hb.sup > 0.0);
        Front lifted = f;
        lifted.tau[p] = hb.sup * (1 - 1e-12);
        CHECK(satisfies_adaptive(lifted, 0, 1.0, params));
      }
    }
  }
}

TEST_CASE("adaptive constraint equals its sine restatement") {
  Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const TriangleShape t = random_triangle(rng);
    const double eps = 0.1 + 0.5 * rng.uniform();
    ConstraintParams params = ConstraintParams::with_epsilon(eps);
    std::array<double, 3> tau = {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2),
                                 rng.uniform(-0.2, 0.2)};
    const double S = 0.5 + rng.uniform();
    const bool primal = satisfies_adaptive_shape(t, tau, S, params);
    const bool restated =
        adaptive_restatement(t, tau, S, eps, params.phi_bar);
    CHECK(primal == restated);
  }
}

TEST_CASE("violating only the bisector inequality is detected") {
  const TriangleShape t{{0, 0}, {1, 0}, {0, 1}};
  ConstraintParams params = ConstraintParams::with_epsilon(0.5);
  const double S = 1.0;
  // tau(b) = tau(c) keeps edges ab, ac, bc flat-ish while the bisector
  // gradient |tau(a) - (tau(b)+tau(c))/2| can exceed its bound alone.
  const double dw_abc = diminished_width(t, params.epsilon, params.phi_bar);
  std::array<double, 3> tau = {dw_abc * S * 1.01, 0.0, 0.0};
  // Check the other three inequalities hold at this assignment.
  const Vec2 w = midpoint(t.v[1], t.v[2]);
  const double r1 =
      2 * diminished_width({w, t.v[2], t.v[0]}, params.epsilon, params.phi_bar);
  const double r3 =
      2 * diminished_width({w, t.v[0], t.v[1]}, params.epsilon, params.phi_bar);
  REQUIRE(std::abs(tau[0] - tau[1]) <= r1 * S);
  REQUIRE(std::abs(tau[0] - tau[2]) <= r3 * S);
  CHECK_FALSE(satisfies_adaptive_shape(t, tau, S, params));
  tau[0] = dw_abc * S * 0.99;
  CHECK(satisfies_adaptive_shape(t, tau, S, params));
}

TEST_CASE("adaptive constraint implies the linear one") {
  Rng rng(71);
  for (int trial = 0; trial < 300; ++trial) {
    const TriangleShape t = random_triangle(rng);
    const double eps = 0.1 + 0.6 * rng.uniform();
    ConstraintParams params = ConstraintParams::with_epsilon(eps);
    std::array<double, 3> tau = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3),
                                 rng.uniform(-0.3, 0.3)};
    const double S = 0.5 + rng.uniform();
    if (satisfies_adaptive_shape(t, tau, S, params))
      CHECK(satisfies_progress_shape(t, tau, S, eps));
  }
}

TEST_CASE("min tentpole guarantee") {
  CHECK(min_tentpole_guarantee(0.5, 1.0, std::sqrt(2.0) / 2) ==
        doctest::Approx(0.3535534).epsilon(1e-6));
  CHECK(min_tentpole_guarantee(0.1, 2.0, 0.7) ==
        doctest::Approx(min_tentpole_guarantee(0.9, 2.0, 0.7)));
}

TEST_CASE("advancing within the guarantee preserves causal and progressive") {
  Rng rng(81);
  const double S = 1.0;
  const WavespeedField field = WavespeedField::constant(S);
  for (int trial = 0; trial < 50; ++trial) {
    SpaceMesh mesh = grid_mesh(rng, 3);
    const double eps = 0.2 + 0.6 * rng.uniform();
    Front f = flat_front(mesh);
    // Build a progressive front by a few random guarded advances.
    for (int step = 0; step < 25; ++step) {
      const auto minima = local_minima(f);
      const int p = minima[rng.below(static_cast<int>(minima.size()))];
      const double guarantee = min_tentpole_guarantee(
          eps, S, width_at_vertex(*f.tri, p));
      const double dt = guarantee * rng.uniform();
      f = advance_vertex(f, p, dt);
      CHECK(is_causal(f, field));
      for (int leaf : f.tri->leaves())
        CHECK(satisfies_progress(f, leaf, S, eps));
    }
  }
}

TEST_CASE("sup operations are monotone in slope") {
  Rng rng(91);
  for (int trial = 0; trial < 40; ++trial) {
    const TriangleShape t = random_triangle(rng);
    SpaceMesh mesh = single_triangle(t);
    Front f = flat_front(mesh);
    const int p = f.tri->tris[0].v[0];
    const double s1 = 0.5 + rng.uniform();
    const double s2 = s1 + rng.uniform();
    CHECK(progress_sup_2d(f, p, 0, s2, 0.5).sup >=
          progress_sup_2d(f, p, 0, s1, 0.5).sup - 1e-12);
    CHECK(causal_sup_2d(f, p, 0, s2).sup >=
          causal_sup_2d(f, p, 0, s1).sup - 1e-12);
    ConstraintParams params = ConstraintParams::with_epsilon(0.5);
    CHECK(adaptive_sup_2d(f, p, 0, s2, params).sup >=
          adaptive_sup_2d(f, p, 0, s1, params).sup - 1e-12);
  }
}
