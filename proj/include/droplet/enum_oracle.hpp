#pragma once

#include <functional>
#include <map>
#include <vector>

#include "droplet/lattice.hpp"
#include "droplet/skeleton.hpp"

namespace droplet {

/// Exact finite-volume law from summing Boltzmann weights over all 2^(L^2)
/// configurations.  Limited to L <= 5.
struct ExactLaw {
  int L = 0;
  double beta = 0.0;
  Boundary boundary = Boundary::plus;
  double log_Z = 0.0;
  std::map<long, double> magnetization_pmf;  // only parity-allowed M appear

  double pmf(long M) const {
    auto it = magnetization_pmf.find(M);
    return it == magnetization_pmf.end() ? 0.0 : it->second;
  }
};

ExactLaw enumerate_distribution(int L, double beta, Boundary boundary);

/// Exact <observable | M_L = M>; rejects M of zero probability.
double conditional_expectation(const ExactLaw& law, long M,
                               const std::function<double(const SpinGrid&)>& observable);

/// Exact probability that the s-large contours of a configuration are
/// compatible with the given skeleton set (one compatible contour per
/// skeleton, matched bijectively).  The batch form evaluates many events in a
/// single sweep over the configurations.
double skeleton_event_probability(const ExactLaw& law, const std::vector<Skeleton>& skeletons,
                                  double s);
std::vector<double> skeleton_event_probabilities(
    const ExactLaw& law, const std::vector<std::vector<Skeleton>>& events, double s);

/// Streams every configuration (Gray-code order within canonical ranges) with
/// its energy and magnetization.  Used by the oracle internals and tests.
void for_each_configuration(int L, Boundary boundary,
                            const std::function<void(const SpinGrid&, double, long)>& fn);

}  // namespace droplet
