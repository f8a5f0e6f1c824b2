#pragma once

#include <vector>

#include "droplet/geometry.hpp"
#include "droplet/surface_tension.hpp"

namespace droplet {

/// Unit-area equilibrium shape: intersection of half-planes
/// { r . n(theta) <= tau(theta) } rescaled to Lebesgue area 1, together with
/// its boundary energy w1.
struct WulffShape {
  Polygon polygon;  // convex, area 1 within 1e-9, contains the origin
  double w1 = 0.0;
  SurfaceTension tau = SurfaceTension::constant(1.0);
  int n_directions = 0;
};

WulffShape build_wulff(const SurfaceTension& tau, int n_directions);

/// Symmetric Hausdorff distance between two finite point sets.
double hausdorff_points(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

/// Same, specialized to integer lattice points (bitmap ring search).
double hausdorff_lattice(const std::vector<IPoint>& a, const std::vector<IPoint>& b);

/// Plaquette centers covered by scale * polygon + shift (convex polygon).
std::vector<IPoint> rasterize_convex(const Polygon& poly, Vec2 shift, double scale);

struct ShapeFit {
  double best_distance = 0.0;
  Vec2 best_shift;
};

/// Upper bound on inf_z d_H(region, z + sqrt(|region|) W): coarse shift grid
/// around the centroid followed by pattern search, both at plaquette
/// rasterization of the scaled shape.
ShapeFit fit_shape(const std::vector<IPoint>& region, const WulffShape& W);

}  // namespace droplet
