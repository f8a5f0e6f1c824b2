#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace droplet {

enum class Boundary : std::uint8_t { plus = 0, minus = 1, free_bc = 2 };

const char* boundary_name(Boundary b);

/// L x L grid of +-1 spins with a fixed boundary condition.  Sites are
/// addressed as (x, y) with 0 <= x, y < L; storage is row-major, index y*L+x.
struct SpinGrid {
  int side = 0;
  Boundary boundary = Boundary::plus;
  std::vector<std::int8_t> spins;

  int spin(int x, int y) const { return spins[(std::size_t)y * side + x]; }
  void set_spin(int x, int y, int s) { spins[(std::size_t)y * side + x] = (std::int8_t)s; }
  bool in_box(int x, int y) const { return x >= 0 && x < side && y >= 0 && y < side; }

  /// Spin seen at (x, y), substituting the boundary spin outside the box.
  /// Free boundary reports 0 outside (no bond).
  int spin_or_boundary(int x, int y) const {
    if (in_box(x, y)) return spin(x, y);
    switch (boundary) {
      case Boundary::plus: return 1;
      case Boundary::minus: return -1;
      default: return 0;
    }
  }

  /// Sum of the four neighbor spins, boundary included.
  int neighbor_sum(int x, int y) const {
    return spin_or_boundary(x - 1, y) + spin_or_boundary(x + 1, y) +
           spin_or_boundary(x, y - 1) + spin_or_boundary(x, y + 1);
  }
};

struct Fill {
  enum class Kind { all_plus, all_minus, random_mix, k_minus };
  Kind kind = Kind::all_plus;
  long k = 0;
  std::uint64_t seed = 0;

  static Fill AllPlus() { return {Kind::all_plus, 0, 0}; }
  static Fill AllMinus() { return {Kind::all_minus, 0, 0}; }
  static Fill Random(std::uint64_t seed) { return {Kind::random_mix, 0, seed}; }
  static Fill KMinus(long k, std::uint64_t seed) { return {Kind::k_minus, k, seed}; }
};

SpinGrid new_grid(int L, Boundary boundary, const Fill& fill);

long total_magnetization(const SpinGrid& grid);

void assert_valid(const SpinGrid& grid);

/// Target magnetization for a droplet-scale deficit v: the allowed value of M
/// closest to m*.L^2 - 2 m*.v (ties broken toward smaller magnitude).
struct DeficitSpec {
  double v = 0.0;
  double m_star = 0.0;
  long target_M = 0;
};

DeficitSpec deficit_target(double m_star, int L, double v);

// Snapshot file: 16-byte header (magic "ISD1", u32 L, u8 boundary, 3 reserved
// bytes, u32 CRC-32 of the payload), then ceil(L^2/8) bytes of row-major
// bit-packed spins, bit 1 = +1, LSB-first within each byte.  Integers are
// little-endian.
void save_snapshot(const SpinGrid& grid, const std::string& path);
SpinGrid load_snapshot(const std::string& path);

std::uint32_t crc32(const std::uint8_t* data, std::size_t len);

}  // namespace droplet
