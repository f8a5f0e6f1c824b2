#pragma once

#include <optional>
#include <vector>

namespace droplet {

struct PhiParams {
  double delta = 0.0;
  int d = 2;
};

/// phi(lambda) = lambda^((d-1)/d) + delta (1-lambda)^2 on [0,1].
double phi(double lambda, const PhiParams& params);

/// Critical deficit parameter (1/d) ((d+1)/2)^((d+1)/d); d >= 2.
double delta_c(int d);

/// Maximal solution in (0,1) of (2d/(d-1)) delta lambda^(1/d) (1-lambda) = 1,
/// when one exists.  Bracketed bisection on [1/(d+1), 1].
std::optional<double> lambda_plus(double delta, int d);

struct PhiSolution {
  double phi_star = 0.0;
  std::vector<double> minimizers;        // ascending; {0}, {l+} or {0, l+}
  std::optional<double> lambda_delta;    // unset exactly at the degenerate point
  std::optional<double> lambda_plus;
};

PhiSolution minimize_phi(const PhiParams& params);

}  // namespace droplet
