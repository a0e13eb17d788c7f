#include <doctest.h>

#include "tentpitcher/driver.hpp"
#include "tentpitcher/space_mesh.hpp"
#include "test_support.hpp"

using namespace tentpitcher;

TEST_CASE("phi of canonical triangles") {
  const TriangleShape equilateral{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
  CHECK(phi(equilateral) == doctest::Approx(1.0));

  const TriangleShape right{{0, 0}, {1, 0}, {0, 1}};
  CHECK(phi(right) == doctest::Approx(1.0));  // right angles are not obtuse

  // Angles 120, 30, 30: rays at +-60 degrees from the apex.
  const double c = std::cos(M_PI / 3), s = std::sin(M_PI / 3);
  const TriangleShape obtuse{{0, 0}, {c, s}, {c, -s}};
  CHECK(phi(obtuse) == doctest::Approx(std::sin(2 * M_PI / 3)).epsilon(1e-12));
  CHECK(phi(obtuse) == doctest::Approx(0.8660254).epsilon(1e-6));
}

TEST_CASE("phi is scale and rotation invariant") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const TriangleShape t = test_support::random_triangle(rng);
    const double s = 0.1 + 10.0 * rng.uniform();
    const double a = rng.uniform() * 2 * M_PI;
    const double ca = std::cos(a), sa = std::sin(a);
    TriangleShape t2;
    for (int k = 0; k < 3; ++k) {
      const Vec2 v = t.v[k] * s;
      t2.v[k] = {ca * v.x - sa * v.y + 3.0, sa * v.x + ca * v.y - 1.0};
    }
    CHECK(phi(t) == doctest::Approx(phi(t2)).epsilon(1e-12));
  }
}

TEST_CASE("phi rejects degenerate triangles") {
  const TriangleShape flat{{0, 0}, {1, 0}, {2, 0}};
  CHECK_THROWS_AS(phi(flat), TpError);
}

TEST_CASE("foot of perpendicular") {
  const Vec2 f = foot_of_perpendicular({0, 0}, {1, 0}, {0, 1});
  CHECK(f.x == doctest::Approx(0.5));
  CHECK(f.y == doctest::Approx(0.5));

  const Vec2 on_line = foot_of_perpendicular({0.25, 0}, {-1, 0}, {1, 0});
  CHECK(on_line.x == doctest::Approx(0.25));
  CHECK(on_line.y == doctest::Approx(0.0));

  const Vec2 sym = foot_of_perpendicular({0, 2}, {-1, 0}, {1, 0});
  CHECK(sym.x == doctest::Approx(0.0));
  CHECK(sym.y == doctest::Approx(0.0));

  CHECK_THROWS_AS(foot_of_perpendicular({0, 0}, {1, 1}, {1, 1}), TpError);
}

TEST_CASE("foot of perpendicular minimizes distance over the line") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 p{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Vec2 a{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    Vec2 b{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    if (dist(a, b) < 1e-3) b.x += 1.0;
    const Vec2 f = foot_of_perpendicular(p, a, b);
    const double df = dist(p, f);
    for (int i = 0; i < 1000; ++i) {
      const Vec2 q = a + (b - a) * rng.uniform(-3, 3);
      CHECK(df <= dist(p, q) + 1e-12);
    }
  }
}

TEST_CASE("width at vertex") {
  // Right triangle with legs 1: distance from the corner to the hypotenuse.
  SpaceMesh mesh = test_support::single_triangle({{0, 0}, {1, 0}, {0, 1}});
  CHECK(width_at_vertex(mesh, 0) == doctest::Approx(std::sqrt(2.0) / 2));

  // 1D vertex with segments of lengths 1 and 2.
  SpaceMesh line;
  line.dim = 1;
  line.vertices = {{0, 0}, {1, 0}, {3, 0}};
  line.boundary = {true, false, true};
  line.cells = {{0, 1, -1}, {1, 2, -1}};
  CHECK(width_at_vertex(line, 1) == doctest::Approx(1.0));

  // Four-triangle fan of the unit square around its center.
  SpaceMesh fan;
  fan.dim = 2;
  fan.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  fan.boundary = {true, true, true, true, false};
  fan.cells = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  fan.assign_default_apexes();
  CHECK(width_at_vertex(fan, 4) == doctest::Approx(0.5));

  SpaceMesh isolated = mesh;
  isolated.vertices.push_back({5, 5});
  isolated.boundary.push_back(true);
  CHECK_THROWS_AS(width_at_vertex(isolated, 3), TpError);
}

TEST_CASE("width at vertex bounded by incident edges") {
  Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const SpaceMesh mesh = test_support::random_disc_mesh(rng, 12);
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
      const double w = width_at_vertex(mesh, static_cast<int>(v));
      for (const auto& cell : mesh.cells)
        for (int i = 0; i < 3; ++i)
          if (cell[i] == static_cast<int>(v))
            for (int k = 1; k <= 2; ++k)
              CHECK(w <= dist(mesh.vertices[v],
                              mesh.vertices[cell[(i + k) % 3]]) +
                             1e-12);
    }
  }
}

TEST_CASE("validate complex") {
  SpaceMesh good;
  good.dim = 2;
  good.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  good.boundary = {true, true, true, true};
  good.cells = {{0, 1, 2}, {0, 2, 3}};
  good.assign_default_apexes();
  CHECK(validate_complex(good).ok());

  SpaceMesh overlapping = good;
  overlapping.cells = {{0, 1, 2}, {0, 1, 3}};  // interiors overlap
  overlapping.vertices[3] = {0.8, 0.5};
  CHECK_FALSE(validate_complex(overlapping).ok());

  SpaceMesh degenerate = good;
  degenerate.cells[1] = {0, 2, 2};
  CHECK_FALSE(validate_complex(degenerate).ok());
}

TEST_CASE("triangle shape derived quantities") {
  const TriangleShape t{{0, 0}, {4, 0}, {0, 3}};
  CHECK(t.area() == doctest::Approx(6.0));
  CHECK(t.diameter() == doctest::Approx(5.0));
  CHECK(t.altitude(0) == doctest::Approx(12.0 / 5.0));
  CHECK(t.angle(0) + t.angle(1) + t.angle(2) == doctest::Approx(M_PI).epsilon(1e-9));
}
