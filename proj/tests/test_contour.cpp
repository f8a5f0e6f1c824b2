#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "droplet/contour.hpp"
#include "droplet/rng.hpp"

using namespace droplet;

namespace {

SpinGrid grid_with_minus(int L, std::initializer_list<std::pair<int, int>> minus,
                         Boundary b = Boundary::plus) {
  SpinGrid g = new_grid(L, b, Fill::AllPlus());
  for (auto [x, y] : minus) g.set_spin(x, y, -1);
  return g;
}

bool site_in_parity_union(const ContourSet& set, int x, int y) {
  int c = 0;
  for (const auto& g : set.contours) c ^= contour_contains(g, x, y) ? 1 : 0;
  return c;
}

void check_closed_simple(const Contour& g) {
  std::map<std::pair<int, int>, int> vertex_count;
  std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> bonds;
  std::size_t n = g.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    DualPoint a = g.vertices[i];
    DualPoint b = g.vertices[(i + 1) % n];
    CHECK((a.x2 & 1) == 1);
    CHECK((a.y2 & 1) == 1);
    CHECK(std::abs(a.x2 - b.x2) + std::abs(a.y2 - b.y2) == 2);  // adjacent dual sites
    vertex_count[{a.x2, a.y2}]++;
    auto pa = std::make_pair(a.x2, a.y2), pb = std::make_pair(b.x2, b.y2);
    auto bond = pa < pb ? std::make_pair(pa, pb) : std::make_pair(pb, pa);
    CHECK(bonds.insert(bond).second);  // no bond reused
  }
  for (auto& [v, c] : vertex_count) CHECK(c <= 2);  // at most one bounce per dual site
}

}  // namespace

TEST_CASE("single minus spin") {
  auto set = extract_contours(grid_with_minus(4, {{0, 0}}));
  REQUIRE(set.contours.size() == 1);
  const Contour& g = set.contours[0];
  CHECK(g.length == 4);
  CHECK(g.interior_area == 1);
  REQUIRE(g.interior_sites.size() == 1);
  CHECK(g.interior_sites[0] == std::pair<int, int>{0, 0});
  CHECK(g.diameter == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(g.external);
}

TEST_CASE("2x1 minus block") {
  auto set = extract_contours(grid_with_minus(4, {{0, 0}, {1, 0}}));
  REQUIRE(set.contours.size() == 1);
  CHECK(set.contours[0].length == 6);
  CHECK(set.contours[0].interior_area == 2);
  CHECK(set.contours[0].diameter == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("diagonal touch splits into two contours") {
  // the rounding-rule regression: minus spins at (0,0) and (1,1)
  auto set = extract_contours(grid_with_minus(4, {{0, 0}, {1, 1}}));
  REQUIRE(set.contours.size() == 2);
  for (const auto& g : set.contours) {
    CHECK(g.length == 4);
    CHECK(g.interior_area == 1);
  }
}

TEST_CASE("antidiagonal touch merges into one contour") {
  auto set = extract_contours(grid_with_minus(4, {{1, 0}, {0, 1}}));
  REQUIRE(set.contours.size() == 1);
  CHECK(set.contours[0].length == 8);
  CHECK(set.contours[0].interior_area == 2);
  check_closed_simple(set.contours[0]);
}

TEST_CASE("L-tromino metrics") {
  auto set = extract_contours(grid_with_minus(5, {{0, 0}, {1, 0}, {0, 1}}));
  REQUIRE(set.contours.size() == 1);
  const Contour& g = set.contours[0];
  CHECK(g.length == 8);
  CHECK(g.interior_area == 3);
  CHECK(g.interior_sites.size() == 3);
  CHECK(g.diameter == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
}

TEST_CASE("annulus: outer external, inner not; interior magnetization") {
  // 3x3 minus ring with plus core, centered on a 5x5 grid
  SpinGrid g = new_grid(5, Boundary::plus, Fill::AllPlus());
  for (int x = 1; x <= 3; ++x)
    for (int y = 1; y <= 3; ++y) g.set_spin(x, y, -1);
  g.set_spin(2, 2, 1);
  auto set = extract_contours(g);
  REQUIRE(set.contours.size() == 2);
  const Contour* outer = &set.contours[0];
  const Contour* inner = &set.contours[1];
  if (outer->interior_area < inner->interior_area) std::swap(outer, inner);
  CHECK(outer->external);
  CHECK_FALSE(inner->external);
  CHECK(outer->interior_area == 9);
  CHECK(inner->interior_area == 1);
  CHECK(interior_magnetization(g, *outer) == -7);  // eight minus, one plus
  CHECK(interior_magnetization(g, *inner) == 1);

  auto ext = external_contours(set);
  CHECK(ext.contours.size() == 1);
  CHECK(ext.contours[0].interior_area == 9);
}

TEST_CASE("two disjoint unit squares are both external") {
  auto set = extract_contours(grid_with_minus(6, {{0, 0}, {4, 4}}));
  REQUIRE(set.contours.size() == 2);
  CHECK(set.contours[0].external);
  CHECK(set.contours[1].external);
}

TEST_CASE("s_large filter") {
  auto set = extract_contours(grid_with_minus(8, {{0, 0}, {3, 3}, {4, 3}, {3, 4}, {4, 4}}));
  CHECK(s_large(set, std::sqrt(2.0)).contours.size() == set.contours.size());
  CHECK(s_large(set, 100.0).contours.empty());
  auto mid = s_large(set, 2.0);
  CHECK(mid.contours.size() == 1);  // only the 2x2 block (diam 2*sqrt2)
  CHECK_THROWS_AS(s_large(set, 0.0), std::invalid_argument);
}

TEST_CASE("free boundary rejected") {
  CHECK_THROWS_AS(extract_contours(new_grid(3, Boundary::free_bc, Fill::AllMinus())),
                  std::invalid_argument);
}

TEST_CASE("winding parity reconstructs the minus set (random grids)") {
  Xoshiro256ss rng(2024);
  for (int trial = 0; trial < 400; ++trial) {
    SpinGrid g = new_grid(4, Boundary::plus, Fill::Random(rng.next()));
    auto set = extract_contours(g);
    for (const auto& c : set.contours) check_closed_simple(c);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        CHECK(site_in_parity_union(set, x, y) == (g.spin(x, y) < 0));
  }
}

TEST_CASE("plus/minus flip symmetry") {
  Xoshiro256ss rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    SpinGrid g = new_grid(6, Boundary::plus, Fill::Random(rng.next()));
    SpinGrid flipped = g;
    flipped.boundary = Boundary::minus;
    for (auto& s : flipped.spins) s = -s;
    auto a = extract_contours(g);
    auto b = extract_contours(flipped);
    REQUIRE(a.contours.size() == b.contours.size());
    for (std::size_t i = 0; i < a.contours.size(); ++i) {
      const auto& va = a.contours[i].vertices;
      const auto& vb = b.contours[i].vertices;
      REQUIRE(va.size() == vb.size());
      for (std::size_t k = 0; k < va.size(); ++k) CHECK(va[k] == vb[k]);
    }
  }
}

TEST_CASE("interior area equals site count (fuzz)") {
  Xoshiro256ss rng(5150);
  for (int trial = 0; trial < 60; ++trial) {
    SpinGrid g = new_grid(8, Boundary::plus, Fill::KMinus(12, rng.next()));
    auto set = extract_contours(g);
    long enclosed = 0;
    for (const auto& c : set.contours) {
      CHECK((long)c.interior_sites.size() == c.interior_area);
      CHECK(c.length % 2 == 0);
      CHECK(c.length >= 4);
      CHECK(c.interior_area >= 1);
      CHECK(c.diameter >= std::sqrt(2.0) - 1e-12);
      if (c.external) enclosed += c.interior_area;
    }
    long minus_count = 0;
    for (auto s : g.spins) minus_count += s < 0;
    CHECK(enclosed >= minus_count);  // external interiors cover all minus sites
  }
}

TEST_CASE("contour json line") {
  auto set = extract_contours(grid_with_minus(3, {{1, 1}}));
  std::string j = contour_json_line(set.contours[0]);
  CHECK(j.find("\"length\":4") != std::string::npos);
  CHECK(j.find("\"area\":1") != std::string::npos);
  CHECK(j.find("\"external\":true") != std::string::npos);
}
