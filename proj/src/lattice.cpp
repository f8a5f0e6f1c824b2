#include "droplet/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "droplet/rng.hpp"

namespace droplet {

const char* boundary_name(Boundary b) {
  switch (b) {
    case Boundary::plus: return "plus";
    case Boundary::minus: return "minus";
    default: return "free";
  }
}

SpinGrid new_grid(int L, Boundary boundary, const Fill& fill) {
  if (L < 1) throw std::invalid_argument("new_grid: L must be >= 1");
  SpinGrid g;
  g.side = L;
  g.boundary = boundary;
  g.spins.assign((std::size_t)L * L, 1);
  long n = (long)L * L;
  switch (fill.kind) {
    case Fill::Kind::all_plus:
      break;
    case Fill::Kind::all_minus:
      std::fill(g.spins.begin(), g.spins.end(), (std::int8_t)-1);
      break;
    case Fill::Kind::random_mix: {
      Xoshiro256ss rng(fill.seed);
      for (auto& s : g.spins) s = rng.coin() ? 1 : -1;
      break;
    }
    case Fill::Kind::k_minus: {
      if (fill.k < 0 || fill.k > n)
        throw std::invalid_argument("new_grid: k_minus count out of range");
      Xoshiro256ss rng(fill.seed);
      std::vector<std::uint32_t> idx(n);
      for (long i = 0; i < n; ++i) idx[i] = (std::uint32_t)i;
      for (long i = 0; i < fill.k; ++i) {
        std::uint64_t j = i + rng.uniform_below((std::uint64_t)(n - i));
        std::swap(idx[i], idx[j]);
        g.spins[idx[i]] = -1;
      }
      break;
    }
  }
  return g;
}

long total_magnetization(const SpinGrid& grid) {
  long m = 0;
  for (auto s : grid.spins) m += s;
  return m;
}

void assert_valid(const SpinGrid& grid) {
  if (grid.side < 1) throw std::runtime_error("SpinGrid: empty");
  if ((long)grid.spins.size() != (long)grid.side * grid.side)
    throw std::runtime_error("SpinGrid: size mismatch");
  for (auto s : grid.spins)
    if (s != 1 && s != -1) throw std::runtime_error("SpinGrid: spin not +-1");
  long n = (long)grid.side * grid.side;
  long M = total_magnetization(grid);
  if (M < -n || M > n || ((M - n) % 2) != 0)
    throw std::runtime_error("SpinGrid: magnetization parity violated");
}

DeficitSpec deficit_target(double m_star, int L, double v) {
  if (!(m_star > 0.0 && m_star <= 1.0))
    throw std::invalid_argument("deficit_target: m_star must be in (0,1]");
  long n = (long)L * L;
  if (!(v > 0.0) || v >= (double)n)
    throw std::invalid_argument("deficit_target: need 0 < v < L^2");
  double ideal = m_star * (double)n - 2.0 * m_star * v;
  int parity = (int)(n % 2);
  long base = (long)std::floor(ideal);
  long best = 0;
  double best_d = -1.0;
  for (long c = base - 2; c <= base + 2; ++c) {
    if (((c % 2) + 2) % 2 != parity) continue;
    if (c < -n || c > n) continue;
    double d = std::abs((double)c - ideal);
    if (best_d < 0 || d < best_d - 1e-12 ||
        (std::abs(d - best_d) <= 1e-12 && std::llabs(c) < std::llabs(best))) {
      best = c;
      best_d = d;
    }
  }
  if (best_d < 0) throw std::invalid_argument("deficit_target: no allowed value");
  return DeficitSpec{v, m_star, best};
}

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
  static std::uint32_t table[256];
  static bool init = false;
  if (!init) {
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      table[i] = c;
    }
    init = true;
  }
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

namespace {
void put_u32(std::uint8_t* p, std::uint32_t v) {
  p[0] = (std::uint8_t)(v & 0xFF);
  p[1] = (std::uint8_t)((v >> 8) & 0xFF);
  p[2] = (std::uint8_t)((v >> 16) & 0xFF);
  p[3] = (std::uint8_t)((v >> 24) & 0xFF);
}
std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t)p[0] | ((std::uint32_t)p[1] << 8) | ((std::uint32_t)p[2] << 16) |
         ((std::uint32_t)p[3] << 24);
}
}  // namespace

void save_snapshot(const SpinGrid& grid, const std::string& path) {
  long n = (long)grid.side * grid.side;
  std::vector<std::uint8_t> payload((std::size_t)((n + 7) / 8), 0);
  for (long i = 0; i < n; ++i)
    if (grid.spins[i] > 0) payload[i >> 3] |= (std::uint8_t)(1u << (i & 7));
  std::uint8_t header[16];
  std::memcpy(header, "ISD1", 4);
  put_u32(header + 4, (std::uint32_t)grid.side);
  header[8] = (std::uint8_t)grid.boundary;
  header[9] = header[10] = header[11] = 0;
  put_u32(header + 12, crc32(payload.data(), payload.size()));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_snapshot: cannot open " + path);
  out.write((const char*)header, sizeof header);
  out.write((const char*)payload.data(), (std::streamsize)payload.size());
  if (!out) throw std::runtime_error("save_snapshot: write failed for " + path);
}

SpinGrid load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_snapshot: cannot open " + path);
  std::uint8_t header[16];
  in.read((char*)header, sizeof header);
  if (!in || std::memcmp(header, "ISD1", 4) != 0)
    throw std::runtime_error("load_snapshot: bad magic in " + path);
  long L = get_u32(header + 4);
  if (L < 1 || L > 1 << 15) throw std::runtime_error("load_snapshot: bad side");
  if (header[8] > 2) throw std::runtime_error("load_snapshot: bad boundary code");
  long n = L * L;
  std::vector<std::uint8_t> payload((std::size_t)((n + 7) / 8));
  in.read((char*)payload.data(), (std::streamsize)payload.size());
  if (!in) throw std::runtime_error("load_snapshot: truncated payload");
  if (crc32(payload.data(), payload.size()) != get_u32(header + 12))
    throw std::runtime_error("load_snapshot: checksum mismatch");
  SpinGrid g;
  g.side = (int)L;
  g.boundary = (Boundary)header[8];
  g.spins.resize((std::size_t)n);
  for (long i = 0; i < n; ++i)
    g.spins[i] = (payload[i >> 3] >> (i & 7)) & 1 ? 1 : -1;
  return g;
}

}  // namespace droplet
