#include "droplet/contour.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "droplet/geometry.hpp"

namespace droplet {

namespace {

// Sides around a dual vertex.
enum Side : int { N = 0, E = 1, S = 2, W = 3 };

inline int opposite(int s) { return (s + 2) & 3; }

// Resolution of a four-valent crossing: the passage pairs {S,W} and {N,E}.
inline int cross_pair(int in) {
  switch (in) {
    case S: return W;
    case W: return S;
    case N: return E;
    default: return N;
  }
}

struct BondGrid {
  int L;
  // vb[i][j]: vertical dual bond between sites (i-1,j),(i,j); i in [0,L], j in [0,L-1]
  // hb[i][j]: horizontal dual bond between sites (i,j-1),(i,j); i in [0,L-1], j in [0,L]
  std::vector<std::uint8_t> vb, hb, vused, hused;

  explicit BondGrid(int side) : L(side) {
    vb.assign((std::size_t)(L + 1) * L, 0);
    hb.assign((std::size_t)L * (L + 1), 0);
    vused = vb;
    hused = hb;
  }
  std::size_t vidx(int i, int j) const { return (std::size_t)i * L + j; }
  std::size_t hidx(int i, int j) const { return (std::size_t)i * (L + 1) + j; }

  // Bond on side `side` of dual vertex (a,b), a,b in [0,L]; returns kind
  // (0 = vertical, 1 = horizontal) and indices, or false if out of range.
  bool bond_at(int a, int b, int side, int& kind, int& i, int& j) const {
    switch (side) {
      case N:
        if (b > L - 1) return false;
        kind = 0; i = a; j = b;
        return true;
      case S:
        if (b < 1) return false;
        kind = 0; i = a; j = b - 1;
        return true;
      case E:
        if (a > L - 1) return false;
        kind = 1; i = a; j = b;
        return true;
      default:
        if (a < 1) return false;
        kind = 1; i = a - 1; j = b;
        return true;
    }
  }
  bool present(int kind, int i, int j) const {
    return kind == 0 ? vb[vidx(i, j)] : hb[hidx(i, j)];
  }
  bool used(int kind, int i, int j) const {
    return kind == 0 ? vused[vidx(i, j)] : hused[hidx(i, j)];
  }
  void mark(int kind, int i, int j) {
    if (kind == 0) vused[vidx(i, j)] = 1;
    else hused[hidx(i, j)] = 1;
  }
};

inline DualPoint vertex_point(int a, int b) { return DualPoint{2 * a - 1, 2 * b - 1}; }

void step_vertex(int& a, int& b, int side) {
  switch (side) {
    case N: ++b; break;
    case S: --b; break;
    case E: ++a; break;
    default: --a; break;
  }
}

long shoelace_doubled(const std::vector<DualPoint>& v) {
  long s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const DualPoint& p = v[i];
    const DualPoint& q = v[(i + 1) % v.size()];
    s += (long)p.x2 * q.y2 - (long)q.x2 * p.y2;
  }
  return s;  // 8 * enclosed area
}

// Rows of vertical bonds: for each site row y, the sorted dual columns a such
// that the contour has a vertical bond crossing that row at x = a - 1/2.
std::map<int, std::vector<int>> vertical_bond_rows(const std::vector<DualPoint>& verts) {
  std::map<int, std::vector<int>> rows;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const DualPoint& p = verts[i];
    const DualPoint& q = verts[(i + 1) % verts.size()];
    if (p.x2 == q.x2) {
      int a = (p.x2 + 1) / 2;
      int y = (std::min(p.y2, q.y2) + 1) / 2;  // bond spans site row y
      rows[y].push_back(a);
    }
  }
  for (auto& [y, v] : rows) std::sort(v.begin(), v.end());
  return rows;
}

}  // namespace

Contour contour_from_vertices(std::vector<DualPoint> vertices) {
  Contour c;
  if (vertices.size() < 4) throw std::invalid_argument("contour: too few vertices");
  long sl = shoelace_doubled(vertices);
  if (sl < 0) {  // canonical counterclockwise orientation
    std::reverse(vertices.begin() + 1, vertices.end());
    sl = -sl;
  }
  c.vertices = std::move(vertices);
  c.length = (int)c.vertices.size();
  c.interior_area = sl / 8;

  auto rows = vertical_bond_rows(c.vertices);
  long area_check = 0;
  for (const auto& [y, cols] : rows) {
    assert(cols.size() % 2 == 0);
    for (std::size_t t = 0; t + 1 < cols.size(); t += 2) {
      for (int x = cols[t]; x < cols[t + 1]; ++x) c.interior_sites.emplace_back(x, y);
      area_check += cols[t + 1] - cols[t];
    }
  }
  if (area_check != c.interior_area)
    throw std::runtime_error("contour: area/parity mismatch");

  std::vector<IPoint> pts;
  pts.reserve(c.vertices.size());
  for (const auto& p : c.vertices) pts.push_back(IPoint{p.x2, p.y2});
  c.diameter = 0.5 * point_set_diameter(pts);
  return c;
}

bool contour_contains(const Contour& gamma, int x, int y) {
  // Parity of crossings of the eastward ray from the plaquette center.
  int cnt = 0;
  for (std::size_t i = 0; i < gamma.vertices.size(); ++i) {
    const DualPoint& p = gamma.vertices[i];
    const DualPoint& q = gamma.vertices[(i + 1) % gamma.vertices.size()];
    if (p.x2 != q.x2) continue;
    int row = (std::min(p.y2, q.y2) + 1) / 2;
    int a = (p.x2 + 1) / 2;
    if (row == y && a > x) ++cnt;
  }
  return cnt & 1;
}

ContourSet extract_contours(const SpinGrid& grid) {
  if (grid.boundary == Boundary::free_bc)
    throw std::invalid_argument("extract_contours: free boundary has open interfaces");
  const int L = grid.side;
  BondGrid bg(L);

  for (int i = 0; i <= L; ++i)
    for (int j = 0; j < L; ++j)
      bg.vb[bg.vidx(i, j)] =
          grid.spin_or_boundary(i - 1, j) != grid.spin_or_boundary(i, j);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j <= L; ++j)
      bg.hb[bg.hidx(i, j)] =
          grid.spin_or_boundary(i, j - 1) != grid.spin_or_boundary(i, j);

  ContourSet set;
  set.side = L;
  set.boundary = grid.boundary;

  auto degree_sides = [&](int a, int b, int sides[4]) {
    int deg = 0, kind, i, j;
    for (int s = 0; s < 4; ++s)
      if (bg.bond_at(a, b, s, kind, i, j) && bg.present(kind, i, j)) sides[deg++] = s;
    return deg;
  };

  auto trace = [&](int kind0, int i0, int j0) {
    // Start at the lower/left vertex of the bond, walking toward the other end.
    int a = kind0 == 0 ? i0 : i0;
    int b = kind0 == 0 ? j0 : j0;
    int out0 = kind0 == 0 ? N : E;
    bg.mark(kind0, i0, j0);
    std::vector<DualPoint> verts;
    verts.push_back(vertex_point(a, b));
    int ca = a, cb = b;
    step_vertex(ca, cb, out0);
    int in = opposite(out0);
    while (true) {
      int sides[4];
      int deg = degree_sides(ca, cb, sides);
      int out;
      if (deg == 2) {
        out = sides[0] == in ? sides[1] : sides[0];
      } else if (deg == 4) {
        out = cross_pair(in);
      } else {
        throw std::runtime_error("extract_contours: odd dual degree");
      }
      int kind, i, j;
      bg.bond_at(ca, cb, out, kind, i, j);
      if (kind == kind0 && i == i0 && j == j0) break;  // cycle closed
      if (bg.used(kind, i, j)) throw std::runtime_error("extract_contours: bond reuse");
      bg.mark(kind, i, j);
      verts.push_back(vertex_point(ca, cb));
      step_vertex(ca, cb, out);
      in = opposite(out);
    }
    set.contours.push_back(contour_from_vertices(std::move(verts)));
  };

  for (int i = 0; i <= L; ++i)
    for (int j = 0; j < L; ++j)
      if (bg.vb[bg.vidx(i, j)] && !bg.vused[bg.vidx(i, j)]) trace(0, i, j);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j <= L; ++j)
      if (bg.hb[bg.hidx(i, j)] && !bg.hused[bg.hidx(i, j)]) trace(1, i, j);

  // External classification.
  std::size_t n = set.contours.size();
  for (std::size_t c = 0; c < n; ++c) {
    auto& gamma = set.contours[c];
    gamma.external = true;
    if (gamma.interior_sites.empty()) continue;
    auto [rx, ry] = gamma.interior_sites.front();
    for (std::size_t o = 0; o < n && gamma.external; ++o) {
      if (o == c) continue;
      if (contour_contains(set.contours[o], rx, ry)) gamma.external = false;
    }
  }
  return set;
}

ContourSet external_contours(const ContourSet& set) {
  ContourSet out;
  out.side = set.side;
  out.boundary = set.boundary;
  for (const auto& g : set.contours)
    if (g.external) out.contours.push_back(g);
  return out;
}

ContourSet s_large(const ContourSet& set, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("s_large: s must be positive");
  ContourSet out;
  out.side = set.side;
  out.boundary = set.boundary;
  for (const auto& g : set.contours)
    if (g.diameter >= s) out.contours.push_back(g);
  return out;
}

long interior_magnetization(const SpinGrid& grid, const Contour& gamma) {
  long m = 0;
  for (auto [x, y] : gamma.interior_sites) m += grid.spin(x, y);
  return m;
}

std::string contour_json_line(const Contour& gamma) {
  std::ostringstream os;
  os << "{\"vertices\":[";
  for (std::size_t i = 0; i < gamma.vertices.size(); ++i) {
    if (i) os << ',';
    os << '[' << gamma.vertices[i].x2 << ',' << gamma.vertices[i].y2 << ']';
  }
  os << "],\"length\":" << gamma.length << ",\"area\":" << gamma.interior_area;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", gamma.diameter);
  os << ",\"diameter\":" << buf << ",\"external\":" << (gamma.external ? "true" : "false")
     << '}';
  return os.str();
}

}  // namespace droplet
