#pragma once

#include <string>
#include <utility>
#include <vector>

namespace droplet {

inline constexpr double kBetaCritical = 0.4406867935097715;  // (1/2) ln(1 + sqrt 2)

/// Dual inverse temperature, beta* = (1/2) log coth beta.
double dual_beta(double beta);

/// Direction-dependent boundary line cost, invariant under quarter-turn
/// rotations.  Strictly positive everywhere.
class SurfaceTension {
 public:
  enum class Model { constant, tabulated, fourfold };

  static SurfaceTension constant(double tau0);
  /// Samples (theta, tau) are folded into [0, pi/2) and interpolated
  /// linearly and periodically.
  static SurfaceTension tabulated(std::vector<std::pair<double, double>> samples);
  /// tau(theta) = a + b cos(4 theta).
  static SurfaceTension fourfold(double a, double b);

  double operator()(double theta) const;
  double tau_min() const { return tau_min_; }
  Model model() const { return model_; }

  void save_csv(const std::string& path) const;
  static SurfaceTension load_csv(const std::string& path);

 private:
  SurfaceTension() = default;
  Model model_ = Model::constant;
  double a_ = 1.0, b_ = 0.0;
  std::vector<std::pair<double, double>> table_;  // sorted theta in [0, pi/2)
  double tau_min_ = 1.0;
};

struct TauEstimate {
  double value = 0.0;
  double error = 0.0;
  std::vector<std::pair<int, double>> per_width;  // (strip width, estimate)
};

/// Surface tension in lattice direction (k1, k2) from the decay of two-point
/// correlations at the dual temperature, computed with exact strip transfer
/// matrices and extrapolated in 1/width.  Supported directions: axes and
/// diagonals.  Fails if the log-linear decay fit has R^2 < 0.999.
/// The fit window starts late (default r in [32, 64]) because transverse
/// excitation channels contaminate the decay at short separations.
TauEstimate estimate_tau(double beta, int k1, int k2, int max_width = 12, int r_lo = 32,
                         int r_hi = 64);

struct TauSettings {
  int max_width = 12;
  int r_lo = 32;
  int r_hi = 64;
};

/// Anisotropic model anchored at the axis and diagonal estimates,
/// interpolated as a + b cos(4 theta).
SurfaceTension dual_estimated_tau(double beta, const TauSettings& settings = {});

}  // namespace droplet
