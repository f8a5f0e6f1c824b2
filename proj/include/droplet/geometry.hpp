#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace droplet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct IPoint {
  int x = 0;
  int y = 0;
  friend bool operator==(IPoint a, IPoint b) { return a.x == b.x && a.y == b.y; }
  friend bool operator<(IPoint a, IPoint b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  }
};

/// Closed polygon; edges run between consecutive vertices, last back to first.
struct Polygon {
  std::vector<Vec2> vertices;
};

inline double signed_area(const Polygon& p) {
  double s = 0.0;
  const auto& v = p.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % v.size()];
    s += cross(a, b);
  }
  return 0.5 * s;
}

inline double perimeter(const Polygon& p) {
  double s = 0.0;
  const auto& v = p.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) s += norm(v[(i + 1) % v.size()] - v[i]);
  return s;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 <= 0.0) return norm(p - a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

inline double point_polygon_boundary_distance(Vec2 p, const Polygon& poly) {
  double best = std::numeric_limits<double>::infinity();
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i)
    best = std::min(best, point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
  return best;
}

/// Andrew monotone chain; returns hull in counterclockwise order.
template <class Pt>
std::vector<Pt> convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Pt& a, const Pt& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  std::size_t n = pts.size();
  if (n <= 2) return pts;
  auto cr = [](const Pt& o, const Pt& a, const Pt& b) {
    return (double)(a.x - o.x) * (b.y - o.y) - (double)(a.y - o.y) * (b.x - o.x);
  };
  std::vector<Pt> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cr(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cr(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

template <class Pt>
double point_set_diameter(const std::vector<Pt>& pts) {
  if (pts.empty()) return 0.0;
  auto hull = convex_hull(pts);
  double best2 = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      double dx = hull[i].x - hull[j].x, dy = hull[i].y - hull[j].y;
      best2 = std::max(best2, dx * dx + dy * dy);
    }
  return std::sqrt(best2);
}

inline bool polygon_is_convex(const Polygon& p, double tol = 1e-9) {
  const auto& v = p.vertices;
  std::size_t n = v.size();
  if (n < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double c = cross(v[(i + 1) % n] - v[i], v[(i + 2) % n] - v[(i + 1) % n]);
    if (std::abs(c) <= tol) continue;
    int s = c > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    else if (s != sign) return false;
  }
  return true;
}

/// Even-odd test; suitable for points in generic position w.r.t. the edges.
inline bool point_in_polygon_parity(Vec2 p, const Polygon& poly) {
  bool inside = false;
  const auto& v = poly.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      double xc = v[j].x + (p.y - v[j].y) / (v[i].y - v[j].y) * (v[i].x - v[j].x);
      if (p.x < xc) inside = !inside;
    }
  }
  return inside;
}

}  // namespace droplet
