#include <doctest.h>

#include <cmath>

#include "droplet/contour.hpp"
#include "droplet/rng.hpp"
#include "droplet/sampler.hpp"
#include "droplet/skeleton.hpp"

using namespace droplet;

namespace {

Contour block_contour(int L, int x0, int y0, int w, int h) {
  SpinGrid g = new_grid(L, Boundary::plus, Fill::AllPlus());
  for (int x = x0; x < x0 + w; ++x)
    for (int y = y0; y < y0 + h; ++y) g.set_spin(x, y, -1);
  auto set = extract_contours(g);
  REQUIRE(set.contours.size() == 1);
  return set.contours[0];
}

void check_spacing(const Skeleton& S) {
  for (std::size_t i = 0; i < S.points.size(); ++i) {
    double g = dual_distance(S.points[i], S.points[(i + 1) % S.points.size()]);
    CHECK(g >= S.scale - 1e-9);
    CHECK(g <= 2 * S.scale + 1e-9);
  }
}

}  // namespace

TEST_CASE("skeleton of a 10x10 block at s=4") {
  Contour g = block_contour(14, 2, 2, 10, 10);
  Skeleton S = build_skeleton(g, 4.0);
  CHECK(S.points.size() >= 2);
  check_spacing(S);
  CHECK(check_compatible(g, S));

  std::vector<Vec2> gp, sp;
  for (auto& p : g.vertices) gp.push_back({0.5 * p.x2, 0.5 * p.y2});
  for (auto& p : S.points) sp.push_back({0.5 * p.x2, 0.5 * p.y2});
  CHECK(polyline_hausdorff(gp, sp) <= 4.0 + 1e-9);
}

TEST_CASE("skeleton of the unit square at s=1") {
  Contour g = block_contour(4, 1, 1, 1, 1);
  Skeleton S = build_skeleton(g, 1.0);
  CHECK(S.points.size() >= 2);
  check_spacing(S);
  CHECK(check_compatible(g, S));
}

TEST_CASE("skeleton preconditions") {
  Contour g = block_contour(4, 1, 1, 1, 1);  // diam sqrt(2)
  CHECK_THROWS_AS(build_skeleton(g, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(build_skeleton(g, 0.5), std::invalid_argument);
}

TEST_CASE("compatibility rejects reversal and translation") {
  // an asymmetric L-shaped region
  SpinGrid grid = new_grid(12, Boundary::plus, Fill::AllPlus());
  for (int x = 1; x <= 8; ++x)
    for (int y = 1; y <= 2; ++y) grid.set_spin(x, y, -1);
  for (int x = 1; x <= 2; ++x)
    for (int y = 3; y <= 8; ++y) grid.set_spin(x, y, -1);
  auto set = extract_contours(grid);
  REQUIRE(set.contours.size() == 1);
  const Contour& g = set.contours[0];

  Skeleton S = build_skeleton(g, 3.0);
  REQUIRE(S.points.size() >= 3);
  CHECK(check_compatible(g, S));

  Skeleton rev = S;
  std::reverse(rev.points.begin(), rev.points.end());
  CHECK_FALSE(check_compatible(g, rev));

  Skeleton shifted = S;
  for (auto& p : shifted.points) p.x2 += (int)(6 * S.scale);  // 3s in lattice units
  CHECK_FALSE(check_compatible(g, shifted));
}

TEST_CASE("polygon_of lengths") {
  Skeleton sq;
  sq.scale = 4.0;
  sq.points = {{1, 1}, {11, 1}, {11, 11}, {1, 11}};  // a 5x5 square of dual points
  CHECK(polygon_length(polygon_of(sq)) == doctest::Approx(20.0).epsilon(1e-12));

  Skeleton two;
  two.scale = 2.0;
  two.points = {{1, 1}, {7, 1}};
  CHECK(polygon_length(polygon_of(two)) == doctest::Approx(6.0).epsilon(1e-12));

  Skeleton col;
  col.scale = 1.0;
  col.points = {{1, 1}, {5, 1}, {9, 1}};
  CHECK(polygon_length(polygon_of(col)) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("winding region areas") {
  Polygon square;
  square.vertices = {{0, 0}, {3, 0}, {3, 3}, {0, 3}};
  CHECK(winding_region_area({square}) == doctest::Approx(9.0).epsilon(1e-12));

  CHECK(winding_region_area({square, square}) == doctest::Approx(0.0).epsilon(1e-12));

  // figure eight through the origin: lobes of areas 2 and 3
  Polygon eight;
  eight.vertices = {{0, 0}, {1, 0}, {1, 2}, {0, 2}, {0, 0}, {0, -1}, {-3, -1}, {-3, 0}};
  CHECK(winding_region_area({eight}) == doctest::Approx(5.0).epsilon(1e-12));

  // bow tie with a proper crossing at (2,1); the odd region covers area 4
  Polygon bow;
  bow.vertices = {{0, 0}, {4, 0}, {0, 2}, {4, 2}};
  CHECK(winding_region_area({bow}) == doctest::Approx(4.0).epsilon(1e-9));

  // non half-integer vertices take the adaptive path
  Polygon rot;
  double c = std::cos(0.3), s = std::sin(0.3);
  for (Vec2 v : {Vec2{0, 0}, Vec2{2, 0}, Vec2{2, 2}, Vec2{0, 2}})
    rot.vertices.push_back({c * v.x - s * v.y, s * v.x + c * v.y});
  CHECK(winding_region_area({rot}) == doctest::Approx(4.0).epsilon(2e-4));
}

TEST_CASE("wulff functional on polygons") {
  Polygon unit_square;
  unit_square.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  auto tau1 = SurfaceTension::constant(1.0);
  CHECK(wulff_functional(unit_square, tau1) == doctest::Approx(4.0).epsilon(1e-12));
  auto tau3 = SurfaceTension::constant(3.0);
  Polygon tri;
  tri.vertices = {{0, 0}, {4, 0}, {0, 3}};
  CHECK(wulff_functional(tri, tau3) == doctest::Approx(3.0 * 12.0).epsilon(1e-12));

  Skeleton sq;
  sq.scale = 4.0;
  sq.points = {{1, 1}, {11, 1}, {11, 11}, {1, 11}};
  CHECK(wulff_functional(std::vector<Skeleton>{sq, sq}, tau1) ==
        doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("skeleton invariants on sampled grids") {
  // a scaled-down version of the fuzz gate: every s-large contour must yield
  // a skeleton satisfying the spacing and compatibility conditions
  const int L = 24;
  const double s = 5.0;
  Xoshiro256ss rng(909);
  SpinGrid g = new_grid(L, Boundary::plus, Fill::Random(909));
  for (int i = 0; i < 200; ++i) metropolis_sweep(g, 0.55, rng);

  int built = 0;
  for (int sample = 0; sample < 300; ++sample) {
    for (int i = 0; i < 3; ++i) metropolis_sweep(g, 0.55, rng);
    auto set = extract_contours(g);
    double tube_sum = 0.0;
    long nsk = 0;
    std::vector<Polygon> skel_polys;
    std::vector<const Contour*> large;
    for (const auto& c : set.contours) {
      if (c.diameter < s) continue;
      large.push_back(&c);
      Skeleton S = build_skeleton(c, s);
      ++built;
      check_spacing(S);
      CHECK(check_compatible(c, S));
      // point count bounded by perimeter over scale
      CHECK((double)S.points.size() <= c.length / s + 1.0);
      tube_sum += polygon_length(polygon_of(S));
      ++nsk;
      skel_polys.push_back(polygon_of(S));
    }
    if (!large.empty()) {
      // volume difference bound: |V(Gamma)| vs |V(S)| within the s-tube
      double v_contours = 0.0;
      for (const auto* c : large) {
        int depth = 0;
        auto [rx, ry] = c->interior_sites.front();
        for (const auto* o : large)
          if (o != c && contour_contains(*o, rx, ry)) ++depth;
        v_contours += (depth % 2 == 0 ? 1.0 : -1.0) * (double)c->interior_area;
      }
      double v_skel = winding_region_area(skel_polys);
      CHECK(std::abs(v_contours - v_skel) <= s * tube_sum + nsk * M_PI * s * s + 1e-6);
    }
  }
  CHECK(built > 0);  // the fuzz actually exercised large contours
}

TEST_CASE("minimal surface tension bound") {
  auto tau = SurfaceTension::fourfold(1.0, 0.2);
  Skeleton sq;
  sq.scale = 4.0;
  sq.points = {{1, 1}, {11, 1}, {11, 11}, {1, 11}};
  double w = wulff_functional(std::vector<Skeleton>{sq}, tau);
  CHECK(w >= tau.tau_min() * polygon_length(polygon_of(sq)) - 1e-12);
}
