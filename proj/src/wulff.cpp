#include "droplet/wulff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "droplet/skeleton.hpp"

namespace droplet {

namespace {

Polygon clip_halfplane(const Polygon& p, Vec2 n, double c) {
  Polygon out;
  const auto& v = p.vertices;
  std::size_t m = v.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % m];
    double da = dot(n, a) - c;
    double db = dot(n, b) - c;
    if (da <= 0) out.vertices.push_back(a);
    if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
      double t = da / (da - db);
      out.vertices.push_back(a + t * (b - a));
    }
  }
  return out;
}

void dedupe(Polygon& p, double tol) {
  Polygon out;
  for (const auto& v : p.vertices) {
    if (out.vertices.empty() || norm(v - out.vertices.back()) > tol)
      out.vertices.push_back(v);
  }
  while (out.vertices.size() > 1 &&
         norm(out.vertices.front() - out.vertices.back()) <= tol)
    out.vertices.pop_back();
  p = std::move(out);
}

}  // namespace

WulffShape build_wulff(const SurfaceTension& tau, int n_directions) {
  if (n_directions < 8 || n_directions % 4 != 0)
    throw std::invalid_argument("build_wulff: n_directions must be a multiple of 4, >= 8");
  if (!(tau.tau_min() > 0.0)) throw std::invalid_argument("build_wulff: degenerate tau");

  double tmax = 0.0;
  for (int j = 0; j < n_directions; ++j)
    tmax = std::max(tmax, tau(2.0 * M_PI * j / n_directions));

  double R = 4.0 * tmax;
  Polygon poly;
  poly.vertices = {{-R, -R}, {R, -R}, {R, R}, {-R, R}};
  for (int j = 0; j < n_directions; ++j) {
    double th = 2.0 * M_PI * j / n_directions;
    Vec2 n{std::cos(th), std::sin(th)};
    poly = clip_halfplane(poly, n, tau(th));
    if (poly.vertices.size() < 3) throw std::runtime_error("build_wulff: empty intersection");
  }
  dedupe(poly, 1e-12 * tmax);

  double area = std::abs(signed_area(poly));
  if (!(area > 0)) throw std::runtime_error("build_wulff: degenerate shape");
  double scale = 1.0 / std::sqrt(area);
  for (auto& v : poly.vertices) v = scale * v;

  WulffShape w;
  w.polygon = std::move(poly);
  w.tau = tau;
  w.n_directions = n_directions;
  w.w1 = wulff_functional(w.polygon, tau);
  return w;
}

double hausdorff_points(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff: empty set");
  auto directed = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
    double sup = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) {
        double dx = p.x - q.x, dy = p.y - q.y;
        best = std::min(best, dx * dx + dy * dy);
        if (best <= sup * sup) break;
      }
      sup = std::max(sup, std::sqrt(best));
    }
    return sup;
  };
  return std::max(directed(a, b), directed(b, a));
}

namespace {

struct LatticeMask {
  int x0 = 0, y0 = 0, w = 0, h = 0;
  std::vector<std::uint8_t> m;

  explicit LatticeMask(const std::vector<IPoint>& pts) {
    int x1 = pts[0].x, y1 = pts[0].y;
    x0 = x1;
    y0 = y1;
    for (const auto& p : pts) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
    w = x1 - x0 + 1;
    h = y1 - y0 + 1;
    m.assign((std::size_t)w * h, 0);
    for (const auto& p : pts) m[(std::size_t)(p.y - y0) * w + (p.x - x0)] = 1;
  }
  bool at(int x, int y) const {
    int ix = x - x0, iy = y - y0;
    if (ix < 0 || ix >= w || iy < 0 || iy >= h) return false;
    return m[(std::size_t)iy * w + ix];
  }
};

long nearest_sq(const LatticeMask& mask, IPoint p, long bail_sq) {
  if (mask.at(p.x, p.y)) return 0;
  long best = std::numeric_limits<long>::max();
  int gapx = std::max({mask.x0 - p.x, 0, p.x - (mask.x0 + mask.w - 1)});
  int gapy = std::max({mask.y0 - p.y, 0, p.y - (mask.y0 + mask.h - 1)});
  int k0 = std::max(1, std::max(gapx, gapy));
  int kmax = std::max(mask.w, mask.h) + std::max(gapx, gapy) + 2;
  for (int k = k0; k <= kmax; ++k) {
    if ((long)k * k >= best) break;
    if (best <= bail_sq) break;
    for (int dx = -k; dx <= k; ++dx) {
      for (int dy : {-k, k}) {
        if (mask.at(p.x + dx, p.y + dy)) {
          long d2 = (long)dx * dx + (long)dy * dy;
          best = std::min(best, d2);
        }
      }
    }
    for (int dy = -k + 1; dy <= k - 1; ++dy) {
      for (int dx : {-k, k}) {
        if (mask.at(p.x + dx, p.y + dy)) {
          long d2 = (long)dx * dx + (long)dy * dy;
          best = std::min(best, d2);
        }
      }
    }
  }
  return best;
}

}  // namespace

double hausdorff_lattice(const std::vector<IPoint>& a, const std::vector<IPoint>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff: empty set");
  LatticeMask ma(a), mb(b);
  long sup_sq = 0;
  for (const auto& p : a) sup_sq = std::max(sup_sq, nearest_sq(mb, p, sup_sq));
  for (const auto& p : b) sup_sq = std::max(sup_sq, nearest_sq(ma, p, sup_sq));
  return std::sqrt((double)sup_sq);
}

std::vector<IPoint> rasterize_convex(const Polygon& poly, Vec2 shift, double scale) {
  // row-interval rasterization of a convex polygon
  std::vector<Vec2> v;
  v.reserve(poly.vertices.size());
  double ymin = 1e300, ymax = -1e300;
  for (const auto& p : poly.vertices) {
    Vec2 q{scale * p.x + shift.x, scale * p.y + shift.y};
    v.push_back(q);
    ymin = std::min(ymin, q.y);
    ymax = std::max(ymax, q.y);
  }
  std::vector<IPoint> out;
  for (int y = (int)std::ceil(ymin); y <= (int)std::floor(ymax); ++y) {
    double xlo = 1e300, xhi = -1e300;
    std::size_t m = v.size();
    for (std::size_t i = 0; i < m; ++i) {
      Vec2 a = v[i], b = v[(i + 1) % m];
      if (a.y == b.y) {
        if (a.y == (double)y) {
          xlo = std::min({xlo, a.x, b.x});
          xhi = std::max({xhi, a.x, b.x});
        }
        continue;
      }
      double t = ((double)y - a.y) / (b.y - a.y);
      if (t < 0.0 || t > 1.0) continue;
      double x = a.x + t * (b.x - a.x);
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
    }
    if (xlo > xhi) continue;
    for (int x = (int)std::ceil(xlo); x <= (int)std::floor(xhi); ++x)
      out.push_back(IPoint{x, y});
  }
  return out;
}

namespace {

Polygon downsample_polygon(const Polygon& p, std::size_t max_verts) {
  if (p.vertices.size() <= max_verts) return p;
  Polygon out;
  double step = (double)p.vertices.size() / max_verts;
  for (std::size_t i = 0; i < max_verts; ++i)
    out.vertices.push_back(p.vertices[(std::size_t)(i * step)]);
  return out;
}

}  // namespace

ShapeFit fit_shape(const std::vector<IPoint>& region, const WulffShape& W) {
  if (region.empty()) throw std::invalid_argument("fit_shape: empty region");
  double scale = std::sqrt((double)region.size());
  Polygon poly = downsample_polygon(W.polygon, 96);

  double cx = 0, cy = 0;
  for (const auto& p : region) {
    cx += p.x;
    cy += p.y;
  }
  cx /= region.size();
  cy /= region.size();
  double diam = std::max(point_set_diameter(region), 2.0);

  Vec2 pc{0, 0};
  for (const auto& v : poly.vertices) pc = pc + v;
  pc = (1.0 / poly.vertices.size()) * pc;

  auto objective = [&](Vec2 z) {
    auto pts = rasterize_convex(poly, z, scale);
    if (pts.empty())
      pts.push_back(IPoint{(int)std::lround(scale * pc.x + z.x),
                           (int)std::lround(scale * pc.y + z.y)});
    return hausdorff_lattice(region, pts);
  };

  double step = diam / 64.0;
  Vec2 best_z{cx, cy};
  double best = objective(best_z);
  for (int i = -16; i <= 16; ++i)
    for (int j = -16; j <= 16; ++j) {
      if (i == 0 && j == 0) continue;
      Vec2 z{cx + i * step, cy + j * step};
      double d = objective(z);
      if (d < best) {
        best = d;
        best_z = z;
      }
    }

  double tol = 1e-3 * scale;
  while (step > tol) {
    bool improved = false;
    for (Vec2 dz : {Vec2{step, 0}, Vec2{-step, 0}, Vec2{0, step}, Vec2{0, -step}}) {
      Vec2 z = best_z + dz;
      double d = objective(z);
      if (d < best - 1e-15) {
        best = d;
        best_z = z;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return ShapeFit{best, best_z};
}

}  // namespace droplet
