#include "droplet/skeleton.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace droplet {

namespace {

std::vector<Vec2> contour_polyline(const Contour& gamma) {
  std::vector<Vec2> out;
  out.reserve(gamma.vertices.size());
  for (const auto& p : gamma.vertices) out.push_back({0.5 * p.x2, 0.5 * p.y2});
  return out;
}

std::vector<Vec2> skeleton_polyline(const Skeleton& S) {
  std::vector<Vec2> out;
  out.reserve(S.points.size());
  for (const auto& p : S.points) out.push_back({0.5 * p.x2, 0.5 * p.y2});
  return out;
}

// sup over sampled points of A of the exact distance to the closed polyline B.
double directed_polyline_sup(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                             double step) {
  double sup = 0.0;
  auto dist_to_b = [&](Vec2 p, double bail) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < b.size(); ++i) {
      best = std::min(best, point_segment_distance(p, b[i], b[(i + 1) % b.size()]));
      if (best <= bail) return best;
    }
    return best;
  };
  for (std::size_t i = 0; i < a.size(); ++i) {
    Vec2 p = a[i], q = a[(i + 1) % a.size()];
    double len = norm(q - p);
    int n = std::max(1, (int)std::ceil(len / step));
    for (int k = 0; k < n; ++k) {
      Vec2 x = p + ((double)k / n) * (q - p);
      double d = dist_to_b(x, sup);
      if (d > sup) sup = d;
    }
  }
  return sup;
}

}  // namespace

double polyline_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  const double step = 0.25;
  return std::max(directed_polyline_sup(a, b, step), directed_polyline_sup(b, a, step));
}

Polygon polygon_of(const Skeleton& S) {
  if (S.points.size() < 2) throw std::invalid_argument("polygon_of: skeleton too small");
  Polygon p;
  p.vertices = skeleton_polyline(S);
  return p;
}

namespace {

bool spacing_ok(const std::vector<DualPoint>& pts, double s) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double g = dual_distance(pts[i], pts[(i + 1) % pts.size()]);
    if (g < s - 1e-9 || g > 2.0 * s + 1e-9) return false;
  }
  return true;
}

}  // namespace

bool check_compatible(const Contour& gamma, const Skeleton& S) {
  const auto& verts = gamma.vertices;
  const std::size_t N = verts.size();
  const std::size_t n = S.points.size();
  if (n < 2) return false;

  // (1) ordered passage: an assignment of occurrences, strictly increasing in
  // the cyclic order of the canonical traversal, must exist.
  std::vector<std::vector<std::size_t>> occ(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < N; ++k)
      if (verts[k] == S.points[i]) occ[i].push_back(k);
    if (occ[i].empty()) return false;
  }
  bool ordered = false;
  for (std::size_t start : occ[0]) {
    std::size_t prev = 0;  // relative position of previous match
    bool ok = true;
    for (std::size_t i = 1; i < n && ok; ++i) {
      std::size_t best = N;  // earliest occurrence strictly after prev
      for (std::size_t k : occ[i]) {
        std::size_t rel = (k + N - start) % N;
        if (rel > prev && rel < best) best = rel;
      }
      if (best == N) ok = false;
      else prev = best;
    }
    if (ok) {
      ordered = true;
      break;
    }
  }
  if (!ordered) return false;

  // (2) Hausdorff proximity.
  double dh = polyline_hausdorff(contour_polyline(gamma), skeleton_polyline(S));
  return dh <= S.scale + 1e-9;
}

namespace {

// Greedy pass: from start vertex, next point at the first vertex whose
// distance from the previous point reaches s.
std::vector<std::size_t> greedy_indices(const std::vector<DualPoint>& verts,
                                        std::size_t start, double s) {
  const std::size_t N = verts.size();
  std::vector<std::size_t> picks{start};
  std::size_t last = start;
  for (std::size_t off = 1; off < N; ++off) {
    std::size_t k = (start + off) % N;
    if (dual_distance(verts[k], verts[last]) >= s) {
      picks.push_back(k);
      last = k;
    }
  }
  return picks;
}

std::optional<Skeleton> finish(const Contour& gamma, std::vector<std::size_t> idx,
                               double s) {
  if (idx.size() < 2) return std::nullopt;
  Skeleton S;
  S.scale = s;
  for (auto k : idx) S.points.push_back(gamma.vertices[k]);
  if (!spacing_ok(S.points, s)) return std::nullopt;
  if (!check_compatible(gamma, S)) return std::nullopt;
  return S;
}

std::optional<Skeleton> build_from_start(const Contour& gamma, std::size_t start, double s) {
  const auto& verts = gamma.vertices;
  const std::size_t N = verts.size();
  auto idx = greedy_indices(verts, start, s);
  if (idx.size() < 2) return std::nullopt;

  double closing = dual_distance(verts[idx.back()], verts[idx.front()]);
  if (closing >= s - 1e-9) {
    if (auto S = finish(gamma, idx, s)) return S;
  }

  // Closing edge too short: replace the last point by the best vertex of the
  // closing arc, or drop it.
  std::size_t n = idx.size();
  if (n >= 3) {
    std::size_t prev = idx[n - 2];
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t best_k = N;
    std::size_t prev_rel = (prev + N - start) % N;
    for (std::size_t off = prev_rel + 1; off < N; ++off) {
      std::size_t k = (start + off) % N;
      double g1 = dual_distance(verts[prev], verts[k]);
      double g2 = dual_distance(verts[k], verts[start]);
      if (g1 < s || g1 > 2 * s || g2 < s || g2 > 2 * s) continue;
      double cost = std::max(g1, g2);
      if (cost < best_cost) {
        best_cost = cost;
        best_k = k;
      }
    }
    if (best_k != N) {
      auto repaired = idx;
      repaired[n - 1] = best_k;
      if (auto S = finish(gamma, repaired, s)) return S;
    }
    auto dropped = idx;
    dropped.pop_back();
    if (auto S = finish(gamma, dropped, s)) return S;
  }
  if (auto S = finish(gamma, idx, s)) return S;  // keep as built, verify anyway
  return std::nullopt;
}

}  // namespace

Skeleton build_skeleton(const Contour& gamma, double s) {
  if (s < 1.0) throw std::invalid_argument("build_skeleton: scale below lattice spacing");
  if (gamma.diameter < s) throw std::invalid_argument("build_skeleton: diam(gamma) < s");
  const auto& verts = gamma.vertices;
  const std::size_t N = verts.size();

  // Start candidates: vertices with another vertex at distance >= s, the
  // diameter endpoint first.
  std::vector<double> reach(N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      reach[i] = std::max(reach[i], dual_distance(verts[i], verts[j]));
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return reach[a] > reach[b]; });

  for (std::size_t i : order) {
    if (reach[i] < s) break;
    if (auto S = build_from_start(gamma, i, s)) return *S;
  }
  throw std::runtime_error("build_skeleton: no valid skeleton found");
}

double wulff_functional(const Polygon& p, const SurfaceTension& tau) {
  if (!(tau.tau_min() > 0.0))
    throw std::invalid_argument("wulff_functional: tau must be strictly positive");
  double total = 0.0;
  const auto& v = p.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Vec2 e = v[(i + 1) % v.size()] - v[i];
    double len = norm(e);
    if (len <= 0.0) continue;
    double normal_angle = std::atan2(e.y, e.x) + M_PI / 2.0;
    total += len * tau(normal_angle);
  }
  return total;
}

double wulff_functional(const std::vector<Skeleton>& skeletons, const SurfaceTension& tau) {
  double total = 0.0;
  for (const auto& S : skeletons) total += wulff_functional(polygon_of(S), tau);
  return total;
}

// ---------------------------------------------------------------------------
// Winding-parity area.

namespace {

struct Frac {
  __int128 n = 0, d = 1;  // d > 0

  static __int128 iabs(__int128 v) { return v < 0 ? -v : v; }
  static __int128 igcd(__int128 a, __int128 b) {
    a = iabs(a);
    b = iabs(b);
    while (b) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a ? a : 1;
  }
  void reduce() {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = igcd(n, d);
    n /= g;
    d /= g;
  }
  static Frac of(long long v) { return Frac{v, 1}; }
  static Frac make(__int128 n, __int128 d) {
    Frac f{n, d};
    f.reduce();
    return f;
  }
  Frac operator+(const Frac& o) const { return make(n * o.d + o.n * d, d * o.d); }
  Frac operator-(const Frac& o) const { return make(n * o.d - o.n * d, d * o.d); }
  Frac operator*(const Frac& o) const { return make(n * o.n, d * o.d); }
  bool operator<(const Frac& o) const { return n * o.d < o.n * d; }
  bool operator==(const Frac& o) const { return n * o.d == o.n * d; }
  double value() const { return (double)n / (double)d; }
};

struct Edge2i {
  long long x1, y1, x2, y2;  // doubled coordinates
};

// Exact odd-parity area for polygons whose vertices are half-integers.
double winding_area_exact(const std::vector<Polygon>& polys) {
  std::vector<Edge2i> edges;
  for (const auto& p : polys) {
    std::size_t m = p.vertices.size();
    for (std::size_t i = 0; i < m; ++i) {
      Vec2 a = p.vertices[i], b = p.vertices[(i + 1) % m];
      Edge2i e{std::llround(2 * a.x), std::llround(2 * a.y), std::llround(2 * b.x),
               std::llround(2 * b.y)};
      if (e.x1 == e.x2 && e.y1 == e.y2) continue;
      edges.push_back(e);
    }
  }
  if (edges.empty()) return 0.0;

  std::vector<Frac> events;
  for (const auto& e : edges) {
    events.push_back(Frac::of(e.x1));
    events.push_back(Frac::of(e.x2));
  }
  // Proper crossings of non-parallel edge pairs.
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      const auto &e = edges[i], &f = edges[j];
      __int128 rx = e.x2 - e.x1, ry = e.y2 - e.y1;
      __int128 wx = f.x2 - f.x1, wy = f.y2 - f.y1;
      __int128 den = rx * wy - ry * wx;
      if (den == 0) continue;
      __int128 qpx = f.x1 - e.x1, qpy = f.y1 - e.y1;
      __int128 tn = qpx * wy - qpy * wx;  // t = tn/den along e
      __int128 un = qpx * ry - qpy * rx;  // u = un/den along f
      auto within = [](__int128 num, __int128 den2) {
        if (den2 > 0) return num >= 0 && num <= den2;
        return num <= 0 && num >= den2;
      };
      if (!within(tn, den) || !within(un, den)) continue;
      events.push_back(Frac::make((__int128)e.x1 * den + tn * rx, den));
    }

  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(),
                           [](const Frac& a, const Frac& b) { return !(a < b) && !(b < a); }),
               events.end());

  double area4 = 0.0;  // in doubled-coordinate units (area scales by 4)
  std::vector<std::pair<Frac, const Edge2i*>> active;
  for (std::size_t t = 0; t + 1 < events.size(); ++t) {
    const Frac& xa = events[t];
    const Frac& xb = events[t + 1];
    Frac xm = Frac::make(xa.n * xb.d + xb.n * xa.d, 2 * xa.d * xb.d);
    auto y_at = [](const Edge2i& e, const Frac& x) {
      Frac dx = x - Frac::of(e.x1);
      return Frac::of(e.y1) +
             Frac::make((__int128)(e.y2 - e.y1) * dx.n, dx.d * (e.x2 - e.x1));
    };
    active.clear();
    for (const auto& e : edges) {
      long long lo = std::min(e.x1, e.x2), hi = std::max(e.x1, e.x2);
      if (lo == hi) continue;
      if (!(Frac::of(lo) < xm) || !(xm < Frac::of(hi))) continue;
      active.emplace_back(y_at(e, xm), &e);
    }
    if (active.empty()) continue;
    std::sort(active.begin(), active.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double w = (xb - xa).value();
    for (std::size_t k = 0; k + 1 < active.size(); k += 2) {
      const Edge2i& lo = *active[k].second;
      const Edge2i& hi = *active[k + 1].second;
      double ga = (y_at(hi, xa) - y_at(lo, xa)).value();
      double gb = (y_at(hi, xb) - y_at(lo, xb)).value();
      area4 += 0.5 * (ga + gb) * w;
    }
  }
  return area4 / 4.0;
}

bool segment_intersects_box(Vec2 a, Vec2 b, double x0, double y0, double x1, double y1) {
  double t0 = 0.0, t1 = 1.0;
  double dx = b.x - a.x, dy = b.y - a.y;
  auto clip = [&](double p, double q) {
    if (p == 0.0) return q >= 0.0;
    double r = q / p;
    if (p < 0) {
      if (r > t1) return false;
      if (r > t0) t0 = r;
    } else {
      if (r < t0) return false;
      if (r < t1) t1 = r;
    }
    return true;
  };
  return clip(-dx, a.x - x0) && clip(dx, x1 - a.x) && clip(-dy, a.y - y0) &&
         clip(dy, y1 - a.y);
}

double winding_area_adaptive(const std::vector<Polygon>& polys) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  double boundary_len = 0.0;
  for (const auto& p : polys) {
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
      const Vec2& v = p.vertices[i];
      x0 = std::min(x0, v.x);
      y0 = std::min(y0, v.y);
      x1 = std::max(x1, v.x);
      y1 = std::max(y1, v.y);
      boundary_len += norm(p.vertices[(i + 1) % p.vertices.size()] - v);
    }
  }
  if (!(x1 > x0) || !(y1 > y0)) return 0.0;
  double bbox_area = (x1 - x0) * (y1 - y0);
  double cell_target = std::max(1e-6 * bbox_area / std::max(boundary_len, 1.0), 1e-12);

  auto parity = [&](Vec2 q) {
    int c = 0;
    for (const auto& p : polys)
      if (point_in_polygon_parity(q, p)) c ^= 1;
    return c;
  };

  struct Cell {
    double x0, y0, x1, y1;
  };
  double area = 0.0;
  std::vector<Cell> stack{{x0, y0, x1, y1}};
  while (!stack.empty()) {
    Cell c = stack.back();
    stack.pop_back();
    double w = c.x1 - c.x0, h = c.y1 - c.y0;
    bool cut = false;
    for (const auto& p : polys) {
      for (std::size_t i = 0; i < p.vertices.size() && !cut; ++i)
        if (segment_intersects_box(p.vertices[i], p.vertices[(i + 1) % p.vertices.size()],
                                   c.x0, c.y0, c.x1, c.y1))
          cut = true;
      if (cut) break;
    }
    Vec2 mid{0.5 * (c.x0 + c.x1), 0.5 * (c.y0 + c.y1)};
    if (!cut) {
      if (parity(mid)) area += w * h;
      continue;
    }
    if (w * h <= cell_target) {
      if (parity(mid)) area += w * h;  // boundary cell, below tolerance
      continue;
    }
    double mx = 0.5 * (c.x0 + c.x1), my = 0.5 * (c.y0 + c.y1);
    stack.push_back({c.x0, c.y0, mx, my});
    stack.push_back({mx, c.y0, c.x1, my});
    stack.push_back({c.x0, my, mx, c.y1});
    stack.push_back({mx, my, c.x1, c.y1});
  }
  return area;
}

bool all_half_integer(const std::vector<Polygon>& polys) {
  for (const auto& p : polys)
    for (const auto& v : p.vertices) {
      if (std::abs(2 * v.x - std::llround(2 * v.x)) > 1e-9) return false;
      if (std::abs(2 * v.y - std::llround(2 * v.y)) > 1e-9) return false;
    }
  return true;
}

}  // namespace

double winding_region_area(const std::vector<Polygon>& polygons) {
  if (polygons.empty()) return 0.0;
  for (const auto& p : polygons)
    if (p.vertices.size() < 2) throw std::invalid_argument("winding_region_area: degenerate polygon");
  if (all_half_integer(polygons)) return winding_area_exact(polygons);
  return winding_area_adaptive(polygons);
}

}  // namespace droplet
