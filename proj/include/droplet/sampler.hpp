#pragma once

#include <optional>
#include <vector>

#include "droplet/lattice.hpp"
#include "droplet/rng.hpp"

namespace droplet {

struct ChainParams {
  double beta = 0.5;
  long sweeps = 1000;
  long thermalization = 0;
  long sample_stride = 1;
  std::uint64_t seed = 0;
  std::optional<long> target_M;  // canonical mode when present
};

/// One pass of L^2 random single-site Metropolis proposals; boundary spins
/// are fixed by the boundary condition.
void metropolis_sweep(SpinGrid& grid, double beta, Xoshiro256ss& rng);

/// One pass of L^2 nonlocal spin-exchange proposals: a uniform plus site and
/// a uniform minus site are swapped with Metropolis acceptance.  M is
/// conserved exactly; a monochromatic grid is a no-op.
void kawasaki_sweep(SpinGrid& grid, double beta, Xoshiro256ss& rng);

/// One Wolff cluster update under plus boundary conditions.  The boundary
/// acts as a frozen plus spin: a cluster that activates a bond to it is
/// grown to completion and then rejected.  Returns whether the cluster was
/// flipped.
bool wolff_step(SpinGrid& grid, double beta, Xoshiro256ss& rng);

struct BulkEstimates {
  double m_star_hat = 0.0;
  double m_star_err = 0.0;
  double chi_hat = 0.0;
  double chi_err = 0.0;
  double beta = 0.0;
  int L = 0;
};

/// Spontaneous magnetization and susceptibility under plus boundary
/// conditions: m* from the mean of M/L^2, chi from Var(M)/L^2, errors from
/// the integrated autocorrelation time.  Fails the split-half consistency
/// check if the two half-run means differ by more than 5 combined standard
/// errors.
BulkEstimates estimate_bulk(double beta, int L, const ChainParams& params);

/// Fixed-M sample stream: k_minus start with k = (L^2 - target_M)/2,
/// thermalization Kawasaki sweeps, then one grid every sample_stride sweeps.
/// A pure function of (seed, params, L).
class CanonicalSampler {
 public:
  CanonicalSampler(const ChainParams& params, int L);
  const SpinGrid& next();
  const SpinGrid& grid() const { return grid_; }

 private:
  ChainParams params_;
  SpinGrid grid_;
  Xoshiro256ss rng_;
  bool started_ = false;
};

std::vector<SpinGrid> sample_canonical(const ChainParams& params, int L, long n_samples);

/// Sokal-windowed integrated autocorrelation time of a scalar series.
double integrated_autocorrelation_time(const std::vector<double>& series);

}  // namespace droplet
