#pragma once

#include <vector>

#include "droplet/contour.hpp"
#include "droplet/geometry.hpp"
#include "droplet/surface_tension.hpp"

namespace droplet {

/// Coarse-grained contour: cyclic tuple of dual-lattice points at scale s,
/// consecutive spacings within [s, 2s] in the l2 metric.
struct Skeleton {
  std::vector<DualPoint> points;  // doubled coordinates, n >= 2
  double scale = 0.0;
};

/// Greedy construction along the contour: start at a diameter endpoint, take
/// the next point at the first vertex whose distance from the previous point
/// reaches s.  A short closing edge is repaired by replacing or dropping the
/// last point (verified against the compatibility conditions).  Requires
/// diam(gamma) >= s and s >= 1 (skeleton points live on the dual lattice).
Skeleton build_skeleton(const Contour& gamma, double s);

/// True iff gamma passes through the skeleton points in cyclic order (in its
/// canonical orientation) and d_H(gamma, P(S)) <= s.
bool check_compatible(const Contour& gamma, const Skeleton& S);

/// The closed polygonal curve induced by the skeleton, in lattice units.
Polygon polygon_of(const Skeleton& S);

inline double polygon_length(const Polygon& p) { return perimeter(p); }

/// Area of the odd-crossing-parity region of a set of closed polygons (which
/// may self-intersect and overlap).  Half-integer vertices are handled by an
/// exact rational planar subdivision; anything else falls back to adaptive
/// cell refinement with relative tolerance ~1e-6.
double winding_region_area(const std::vector<Polygon>& polygons);

/// Boundary energy: sum over edges of tau(outward normal) * edge length.
double wulff_functional(const Polygon& p, const SurfaceTension& tau);
double wulff_functional(const std::vector<Skeleton>& skeletons, const SurfaceTension& tau);

/// Hausdorff distance between two closed polylines, computed by dense
/// sampling (1-Lipschitz in arc length, sample step 1/4) against exact
/// point-segment distances; the result is a lower bound within 1/8.
double polyline_hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

}  // namespace droplet
