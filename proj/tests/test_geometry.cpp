#include "menuprune/geometry/polygon.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace menuprune::geometry;
using Eigen::Vector2d;

namespace {

Polygon to_polygon(const oracle::Poly& p) { return Polygon(p); }

HalfPlaned half_plane(Vector2d n, double b, int origin = 7) {
  HalfPlaned h;
  h.normal = n;
  h.offset = b;
  h.origin = origin;
  return h;
}

}  // namespace

TEST_CASE("clip of the unit square by x <= 0.3") {
  const auto sq = Polygon::rectangle({0, 0}, {1, 1});
  const auto out = clip(sq, half_plane({1, 0}, 0.3));
  CHECK(out.size() == 4);
  CHECK(out.area() == doctest::Approx(0.3).epsilon(1e-14));
  // the new edge carries the half-plane's tag
  CHECK(std::count(out.edge_origins().begin(), out.edge_origins().end(), 7) == 1);
}

TEST_CASE("clip through a vertex and outside") {
  const auto sq = Polygon::rectangle({0, 0}, {1, 1});
  const auto tri = clip(sq, half_plane({1, 1}, 1));
  CHECK(tri.size() == 3);
  CHECK(tri.area() == doctest::Approx(0.5));
  CHECK(clip(sq, half_plane({1, 0}, -0.5)).empty());
  CHECK(clip(sq, half_plane({1, 0}, 0)).empty());  // a single edge left has no area
}

TEST_CASE("redundant half-plane returns the same vertex set") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto p = to_polygon(oracle::random_convex(rng, 12, -1, 1));
    const auto out = clip(p, half_plane({0.3, -0.8}, 10));
    REQUIRE(out.size() == p.size());
    for (std::size_t k = 0; k < p.size(); ++k) CHECK((out.vertex(k) - p.vertex(k)).norm() < 1e-12);
  }
}

TEST_CASE("clip agrees with Sutherland-Hodgman and never expands") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 300; ++t) {
    const auto raw = oracle::random_convex(rng, 10, -1, 1);
    const auto p = to_polygon(raw);
    const Vector2d n(u(rng), u(rng));
    const double b = 0.5 * u(rng);
    const auto out = clip(p, half_plane(n, b));
    const auto ref = oracle::clip(raw, n, b);
    const double ref_area = ref.size() >= 3 ? oracle::area(ref) : 0;
    CHECK(out.area() == doctest::Approx(ref_area).epsilon(1e-10).scale(1));
    CHECK(out.area() <= p.area() + 1e-15);
    CHECK(out.signed_area() >= 0);
    for (const auto& v : out.vertices()) CHECK(n.dot(v) - b <= 1e-12);
  }
}

TEST_CASE("convexity and orientation invariants survive clipping") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 100; ++t) {
    auto p = to_polygon(oracle::random_convex(rng, 15, -1, 1));
    for (int k = 0; k < 4 && !p.empty(); ++k) p = clip(p, half_plane({u(rng), u(rng)}, 0.4 * u(rng) + 0.3));
    for (std::size_t k = 0; k < p.size(); ++k) {
      const Vector2d a = p.vertex(k + 1) - p.vertex(k);
      const Vector2d b = p.vertex(k + 2) - p.vertex(k + 1);
      CHECK(a.x() * b.y() - a.y() * b.x() >= -1e-9 * p.diameter());
      CHECK(a.norm() > 1e-9 * p.diameter());
    }
  }
}

TEST_CASE("clockwise input is reoriented with its edge tags") {
  const Polygon cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}}, {10, 11, 12, 13});
  CHECK(cw.signed_area() == doctest::Approx(1));
  // edge (0,0)-(0,1) was tag 10; it must still be the left edge
  for (std::size_t k = 0; k < cw.size(); ++k) {
    const auto a = cw.vertex(k), b = cw.vertex(k + 1);
    if (a.x() == 0 && b.x() == 0) CHECK(cw.edge_origins()[k] == 10);
    if (a.y() == 0 && b.y() == 0) CHECK(cw.edge_origins()[k] == 13);
  }
}

TEST_CASE("intersect equals clipping one polygon by every edge of the other") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const auto a = oracle::random_convex(rng, 9, -1, 1);
    const auto b = oracle::random_convex(rng, 9, -0.5, 1.5);
    auto ref = a;
    for (std::size_t k = 0; k < b.size() && ref.size() >= 3; ++k) {
      const Vector2d d = b[(k + 1) % b.size()] - b[k];
      const Vector2d n(d.y(), -d.x());
      ref = oracle::clip(ref, n, n.dot(b[k]));
    }
    const double ref_area = ref.size() >= 3 ? oracle::area(ref) : 0;
    const auto ab = intersect(to_polygon(a), to_polygon(b));
    const auto ba = intersect(to_polygon(b), to_polygon(a));
    CHECK(ab.area() == doctest::Approx(ref_area).epsilon(1e-10).scale(1));
    CHECK(ba.area() == doctest::Approx(ab.area()).epsilon(1e-10).scale(1));
  }
}

TEST_CASE("integrate_affine on rectangles matches closed forms") {
  const auto r = Polygon::rectangle({1, 2}, {4, 7});
  // ∬ x = (16-1)/2 * 5, ∬ y = 3 * (49-4)/2
  CHECK(integrate_affine(r, 1.0, 0.0, 0.0) == doctest::Approx(37.5).epsilon(1e-15));
  CHECK(integrate_affine(r, 0.0, 1.0, 0.0) == doctest::Approx(67.5).epsilon(1e-15));
  CHECK(integrate_affine(r, 0.0, 0.0, 2.0) == doctest::Approx(30).epsilon(1e-15));
  CHECK(integrate_affine(Polygon(), 1.0, 1.0, 1.0) == 0);
}

TEST_CASE("integrate_affine agrees with the centroid fan") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 500; ++t) {
    const auto raw = oracle::random_convex(rng, 8, -2, 5);
    const Vector2d g(u(rng), u(rng));
    const double c = u(rng);
    const double ref = oracle::integrate(raw, g, c);
    CHECK(integrate_affine(to_polygon(raw), Affine{g, c, 0}) == doctest::Approx(ref).epsilon(1e-11).scale(1));
  }
}

TEST_CASE("integrals are additive across a chord") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  for (int t = 0; t < 500; ++t) {
    const auto p = to_polygon(oracle::random_convex(rng, 10, -1, 1));
    const Vector2d n(u(rng), u(rng));
    const double b = 0.3 * u(rng);
    const Affine f{{u(rng), u(rng)}, u(rng), 0};
    const auto left = clip(p, half_plane(n, b));
    const auto right = clip(p, half_plane(-n, -b));
    const double whole = integrate_affine(p, f);
    worst = std::max(worst, std::abs(integrate_affine(left, f) + integrate_affine(right, f) - whole) /
                                std::max(1.0, std::abs(whole)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("max_affine_gap returns the maximizing vertex") {
  const auto r = Polygon::rectangle({0, 0}, {2, 1});
  const auto [v, x] = max_affine_gap(r, Affine{{1, -1}, 0.5, 0});
  CHECK(v == doctest::Approx(2.5));
  CHECK(x.isApprox(Vector2d(2, 0)));
  CHECK_THROWS(max_affine_gap(Polygon(), Affine{}));
}

TEST_CASE("cell_vrep matches brute-force membership and tiles the domain") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto dom = Polygon::rectangle({-1, -1}, {1, 1});
  for (int t = 0; t < 30; ++t) {
    std::vector<Affine> basis;
    std::vector<oracle::Plane> planes;
    for (int k = 0; k < 12; ++k) {
      basis.push_back({{u(rng), u(rng)}, 0.5 * u(rng), k});
      planes.push_back({basis.back().gradient, basis.back().intercept, k});
    }
    double total = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const auto cell = cell_vrep(std::span<const Affine>(basis), i, dom);
      total += cell.polygon.area();
      const auto ref = oracle::cell(planes, i, oracle::box(-1, -1, 1, 1));
      CHECK(cell.polygon.area() == doctest::Approx(ref.size() >= 3 ? oracle::area(ref) : 0).epsilon(1e-10).scale(1));
      // active ids are exactly the planes tying with f_i along an edge
      for (int id : cell.active_ids) {
        CHECK(id != basis[i].id);
        bool ties = false;
        for (std::size_t k = 0; k < cell.polygon.size(); ++k) {
          const Vector2d mid = 0.5 * (cell.polygon.vertex(k) + cell.polygon.vertex(k + 1));
          ties = ties || std::abs(basis[i](mid) - basis[static_cast<std::size_t>(id)](mid)) < 1e-9;
        }
        CHECK(ties);
      }
    }
    CHECK(total == doctest::Approx(4).epsilon(1e-12));
  }
}

TEST_CASE("identical functions: the lower id keeps the cell") {
  const auto dom = Polygon::rectangle({0, 0}, {1, 1});
  const std::vector<Affine> basis{{{1, 0}, 0, 5}, {{1, 0}, 0, 2}};
  CHECK(cell_vrep(std::span<const Affine>(basis), 0, dom).polygon.empty());
  CHECK(cell_vrep(std::span<const Affine>(basis), 1, dom).polygon.area() == doctest::Approx(1));
}

TEST_CASE("cell_vrep with a skipped function") {
  const auto dom = Polygon::rectangle({0, 0}, {1, 1});
  const std::vector<Affine> basis{{{1, 0}, 0, 0}, {{0, 0}, 0.5, 1}, {{-1, 0}, 1, 2}};
  const std::span<const Affine> s(basis);
  CHECK(cell_vrep(s, 1, dom).polygon.empty());  // 0.5 <= max(x, 1-x)
  CHECK(cell_vrep(s, 1, dom, 0).polygon.area() == doctest::Approx(0.5));
  // f1 and f2 both bound the cell of f0 along x = 1/2; one tag survives
  CHECK(cell_vrep(s, 0, dom).active_ids.size() == 1);
  CHECK(cell_vrep(s, 0, dom, 1).active_ids == std::vector<int>{2});
  CHECK_THROWS_AS(cell_vrep(s, 1, dom, 1), std::invalid_argument);
  CHECK_THROWS_AS(cell_vrep(s, 3, dom), std::out_of_range);
}
