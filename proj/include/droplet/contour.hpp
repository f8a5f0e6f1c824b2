#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "droplet/lattice.hpp"

namespace droplet {

/// Point of the dual lattice in doubled coordinates: the dual site
/// (i + 1/2, j + 1/2) is stored as (2i+1, 2j+1).  Contour vertices always
/// have both coordinates odd.
struct DualPoint {
  int x2 = 0;
  int y2 = 0;
  friend bool operator==(DualPoint a, DualPoint b) { return a.x2 == b.x2 && a.y2 == b.y2; }
};

inline double dual_distance(DualPoint a, DualPoint b) {
  double dx = 0.5 * (a.x2 - b.x2), dy = 0.5 * (a.y2 - b.y2);
  return std::sqrt(dx * dx + dy * dy);
}

/// Closed, non-self-intersecting dual-lattice curve (after corner rounding)
/// separating opposite spins, traversed counterclockwise.
struct Contour {
  std::vector<DualPoint> vertices;               // cyclic; consecutive at doubled distance 2
  int length = 0;                                // number of dual bonds
  long interior_area = 0;                        // enclosed unit plaquettes
  std::vector<std::pair<int, int>> interior_sites;  // lattice sites inside V(gamma)
  double diameter = 0.0;                         // l2 diameter of V(gamma)
  bool external = false;
};

struct ContourSet {
  std::vector<Contour> contours;
  int side = 0;
  Boundary boundary = Boundary::plus;
};

/// Decomposes the set of dual bonds between opposite spins into closed simple
/// curves.  At a four-valent dual site the cross is resolved into two curves
/// bouncing off each other; the convention joins the two passages so that
/// minus plaquettes touching along the southeast/northwest diagonal stay
/// connected, while a southwest/northeast touch splits.  Free boundary is
/// rejected (open interfaces).
ContourSet extract_contours(const SpinGrid& grid);

/// Contours of the set not enclosed by any other member.
ContourSet external_contours(const ContourSet& set);

/// Contours with diameter >= s.
ContourSet s_large(const ContourSet& set, double s);

/// Sum of spins over the sites enclosed by gamma.
long interior_magnetization(const SpinGrid& grid, const Contour& gamma);

/// Recomputes length/area/sites/diameter from a cyclic vertex list.
Contour contour_from_vertices(std::vector<DualPoint> vertices);

/// True if (x, y) lies in V(gamma).
bool contour_contains(const Contour& gamma, int x, int y);

std::string contour_json_line(const Contour& gamma);

}  // namespace droplet
