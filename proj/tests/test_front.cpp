#include <doctest.h>

#include "tentpitcher/front.hpp"
#include "test_support.hpp"

using namespace tentpitcher;
using namespace test_support;

TEST_CASE("gradient over segments and triangles") {
  SpaceMesh line = line_mesh({0.0, 2.0});
  Front f = flat_front(line);
  f.tau = {0.0, 1.0};
  CHECK(gradient_mag(f, 0) == doctest::Approx(0.5));

  SpaceMesh tri = single_triangle({{0, 0}, {1, 0}, {0, 1}});
  Front g = flat_front(tri);
  CHECK(gradient_mag(g, 0) == doctest::Approx(0.0));
  // tau = 1 at (0,0), 0 at the others: the stored order follows the apex.
  for (size_t v = 0; v < g.tau.size(); ++v)
    g.tau[v] = (g.tri->pos[v].x == 0 && g.tri->pos[v].y == 0) ? 1.0 : 0.0;
  CHECK(gradient_mag(g, 0) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("local minima") {
  SpaceMesh line = line_mesh({0, 1, 2, 3});
  Front f = flat_front(line);
  CHECK(local_minima(f).size() == 4);  // constant front: everything ties

  f.tau = {0.0, 0.5, 1.0, 1.5};
  const auto minima = local_minima(f);
  REQUIRE(minima.size() == 1);
  CHECK(minima[0] == 0);
}

TEST_CASE("local minima match brute-force scan on random fronts") {
  Rng rng(21);
  SpaceMesh mesh = grid_mesh(rng, 5);  // 36 vertices
  Front f = flat_front(mesh);
  for (auto& t : f.tau) t = rng.uniform();
  const auto minima = local_minima(f);
  std::vector<int> oracle;
  for (size_t p = 0; p < mesh.vertices.size(); ++p) {
    bool is_min = true;
    for (const auto& cell : mesh.cells) {
      bool has = false;
      for (int i = 0; i < 3; ++i)
        if (cell[i] == static_cast<int>(p)) has = true;
      if (!has) continue;
      for (int i = 0; i < 3; ++i)
        if (cell[i] != static_cast<int>(p) && f.tau[cell[i]] < f.tau[p])
          is_min = false;
    }
    if (is_min) oracle.push_back(static_cast<int>(p));
  }
  CHECK(minima == oracle);
  CHECK(!minima.empty());
}

TEST_CASE("advance_vertex semantics") {
  SpaceMesh mesh = two_triangle_square();
  Front f = flat_front(mesh);
  const Front same = advance_vertex(f, 0, 0.0);
  CHECK(same.tau == f.tau);

  const Front moved = advance_vertex(f, 0, 1.0);
  CHECK(moved.tau[0] == doctest::Approx(1.0));
  for (int v = 1; v < 4; ++v) CHECK(moved.tau[v] == 0.0);
  CHECK(moved.tri.get() == f.tri.get());  // triangulation shared

  // Non-adjacent advances commute (vertices 1 and 3 are not neighbors).
  const Front ab = advance_vertex(advance_vertex(f, 1, 0.25), 3, 0.5);
  const Front ba = advance_vertex(advance_vertex(f, 3, 0.5), 1, 0.25);
  CHECK(ab.tau == ba.tau);

  CHECK_THROWS_AS(advance_vertex(f, 0, -0.1), TpError);
}

TEST_CASE("is_causal basics") {
  SpaceMesh mesh = two_triangle_square();
  Front f = flat_front(mesh);
  CHECK(is_causal(f, WavespeedField::constant(0.5)));

  SpaceMesh line = line_mesh({0, 1});
  Front g = flat_front(line);
  g.tau = {0.0, 1.5};
  CHECK_FALSE(is_causal(g, WavespeedField::constant(1.0)));
}

TEST_CASE("is_causal agrees with a dense-sampling oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    SpaceMesh mesh = grid_mesh(rng, 3);
    WavespeedField field = random_field(rng);
    Front f = flat_front(mesh);
    for (auto& t : f.tau) t = 0.3 * rng.uniform();
    bool oracle = true;
    for (int leaf : f.tri->leaves()) {
      const STSimplex facet = f.facet(leaf);
      double sampled_min = std::numeric_limits<double>::infinity();
      for (int s = 0; s < 100; ++s) {
        double b0 = rng.uniform(), b1 = rng.uniform();
        if (b0 + b1 > 1.0) {
          b0 = 1.0 - b0;
          b1 = 1.0 - b1;
        }
        STPoint p;
        p.x = facet[0].x * (1 - b0 - b1) + facet[1].x * b0 + facet[2].x * b1;
        p.t = facet[0].t * (1 - b0 - b1) + facet[1].t * b0 + facet[2].t * b1;
        sampled_min = std::min(sampled_min, field.slope_at(p));
      }
      if (gradient_mag(f, leaf) >= sampled_min) oracle = false;
    }
    // The sampled minimum over-estimates the exact one, so an exact
    // causal verdict must also hold for the sampled slopes.
    const bool mine = is_causal(f, field);
    if (mine) CHECK(oracle);
  }
}

TEST_CASE("front time band accessors") {
  SpaceMesh mesh = two_triangle_square();
  Front f = flat_front(mesh);
  f.tau = {0.0, 0.25, 0.5, 0.125};
  CHECK(f.min_time() == doctest::Approx(0.0));
  CHECK(f.max_time() == doctest::Approx(0.5));
}
