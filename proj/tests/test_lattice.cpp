#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "droplet/lattice.hpp"
#include "droplet/rng.hpp"

using namespace droplet;

TEST_CASE("new_grid fills") {
  CHECK(total_magnetization(new_grid(2, Boundary::plus, Fill::AllPlus())) == 4);
  CHECK(total_magnetization(new_grid(3, Boundary::plus, Fill::AllMinus())) == -9);
  CHECK(total_magnetization(new_grid(4, Boundary::plus, Fill::KMinus(5, 1))) == 16 - 10);
  CHECK_THROWS_AS(new_grid(4, Boundary::plus, Fill::KMinus(17, 1)), std::invalid_argument);
  CHECK_THROWS_AS(new_grid(0, Boundary::plus, Fill::AllPlus()), std::invalid_argument);

  SpinGrid r = new_grid(7, Boundary::free_bc, Fill::Random(42));
  long minus = 0;
  for (auto s : r.spins) minus += s < 0;
  CHECK(minus > 0);
  CHECK(minus < 49);
}

TEST_CASE("grid invariants hold for every fill") {
  for (auto fill : {Fill::AllPlus(), Fill::AllMinus(), Fill::Random(3),
                    Fill::KMinus(11, 9)}) {
    SpinGrid g = new_grid(6, Boundary::plus, fill);
    CHECK_NOTHROW(assert_valid(g));
  }
}

TEST_CASE("total_magnetization") {
  CHECK(total_magnetization(new_grid(5, Boundary::plus, Fill::AllPlus())) == 25);
  CHECK(total_magnetization(new_grid(5, Boundary::plus, Fill::AllMinus())) == -25);
  CHECK(total_magnetization(new_grid(4, Boundary::plus, Fill::KMinus(3, 7))) == 10);

  SpinGrid g = new_grid(8, Boundary::plus, Fill::Random(5));
  long m = total_magnetization(g);
  for (auto& s : g.spins) s = -s;
  CHECK(total_magnetization(g) == -m);
}

TEST_CASE("deficit_target") {
  CHECK(deficit_target(1.0, 4, 3).target_M == 10);
  CHECK(deficit_target(0.8, 10, 10).target_M == 64);
  CHECK(deficit_target(0.9, 3, 1).target_M == 7);
  CHECK_THROWS_AS(deficit_target(0.9, 3, 9.0), std::invalid_argument);
  CHECK_THROWS_AS(deficit_target(1.5, 3, 1.0), std::invalid_argument);

  // monotone nonincreasing in v
  long prev = deficit_target(0.77, 12, 0.5).target_M;
  for (double v = 1.0; v < 140.0; v += 0.7) {
    long cur = deficit_target(0.77, 12, v).target_M;
    CHECK(cur <= prev);
    prev = cur;
  }

  // allowed value within 1 of the ideal, correct parity
  DeficitSpec spec = deficit_target(0.9, 7, 5.3);
  CHECK(std::abs((double)spec.target_M - (0.9 * 49 - 2 * 0.9 * 5.3)) <= 1.0);
  CHECK(((spec.target_M - 49) % 2) == 0);
}

TEST_CASE("snapshot round trip and corruption") {
  auto dir = std::filesystem::temp_directory_path() / "droplet_test_snap";
  std::filesystem::create_directories(dir);
  auto path = (dir / "g.isd").string();

  SpinGrid g = new_grid(13, Boundary::minus, Fill::Random(123));
  save_snapshot(g, path);
  SpinGrid h = load_snapshot(path);
  CHECK(h.side == g.side);
  CHECK(h.boundary == g.boundary);
  CHECK(h.spins == g.spins);

  // flip one payload bit: checksum must reject
  {
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    REQUIRE(f);
    std::fseek(f, 17, SEEK_SET);
    int c = std::fgetc(f);
    std::fseek(f, 17, SEEK_SET);
    std::fputc(c ^ 1, f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_snapshot(path), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("rng basics") {
  Xoshiro256ss a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Xoshiro256ss c = derive_stream(7, 0), d = derive_stream(7, 1);
  CHECK(c.next() != d.next());
  Xoshiro256ss e(99);
  for (int i = 0; i < 1000; ++i) {
    auto v = e.uniform_below(13);
    CHECK(v < 13);
  }
}
