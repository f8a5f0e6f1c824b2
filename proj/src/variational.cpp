#include "droplet/variational.hpp"

#include <cmath>
#include <stdexcept>

namespace droplet {

double phi(double lambda, const PhiParams& params) {
  if (params.d < 2) throw std::invalid_argument("phi: d must be >= 2");
  if (params.delta < 0.0) throw std::invalid_argument("phi: delta must be >= 0");
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("phi: lambda outside [0,1]");
  double d = params.d;
  return std::pow(lambda, (d - 1.0) / d) + params.delta * (1.0 - lambda) * (1.0 - lambda);
}

double delta_c(int d) {
  if (d < 2) throw std::invalid_argument("delta_c: d must be >= 2");
  return (1.0 / d) * std::pow((d + 1.0) / 2.0, (d + 1.0) / d);
}

namespace {
// stationarity residual: (2d/(d-1)) delta lambda^(1/d) (1-lambda) - 1
double crit_residual(double lambda, double delta, int d) {
  return (2.0 * d / (d - 1.0)) * delta * std::pow(lambda, 1.0 / d) * (1.0 - lambda) - 1.0;
}
}  // namespace

std::optional<double> lambda_plus(double delta, int d) {
  if (d < 2) throw std::invalid_argument("lambda_plus: d must be >= 2");
  if (!(delta > 0.0)) throw std::invalid_argument("lambda_plus: delta must be > 0");
  double peak = 1.0 / (d + 1.0);  // argmax of lambda^(1/d) (1-lambda)
  double fp = crit_residual(peak, delta, d);
  if (fp < 0.0) return std::nullopt;
  if (fp == 0.0) return peak;
  double lo = peak, hi = 1.0;  // f(lo) >= 0, f(1) = -1 < 0
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    double mid = 0.5 * (lo + hi);
    if (crit_residual(mid, delta, d) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

PhiSolution minimize_phi(const PhiParams& params) {
  if (params.d < 2) throw std::invalid_argument("minimize_phi: d must be >= 2");
  if (params.delta < 0.0) throw std::invalid_argument("minimize_phi: delta must be >= 0");
  PhiSolution sol;
  double phi0 = params.delta;  // phi(0) = delta
  if (params.delta == 0.0) {
    sol.phi_star = 0.0;
    sol.minimizers = {0.0};
    sol.lambda_delta = 0.0;
    return sol;
  }
  sol.lambda_plus = lambda_plus(params.delta, params.d);
  if (!sol.lambda_plus) {
    sol.phi_star = phi0;
    sol.minimizers = {0.0};
    sol.lambda_delta = 0.0;
    return sol;
  }
  double lp = *sol.lambda_plus;
  double phip = phi(lp, params);
  if (std::abs(phi0 - phip) < 1e-12) {  // degenerate minimum
    sol.phi_star = std::min(phi0, phip);
    sol.minimizers = {0.0, lp};
    sol.lambda_delta = std::nullopt;
  } else if (phi0 < phip) {
    sol.phi_star = phi0;
    sol.minimizers = {0.0};
    sol.lambda_delta = 0.0;
  } else {
    sol.phi_star = phip;
    sol.minimizers = {lp};
    sol.lambda_delta = lp;
  }
  return sol;
}

}  // namespace droplet
