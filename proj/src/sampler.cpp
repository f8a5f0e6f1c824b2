#include "droplet/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "droplet/surface_tension.hpp"

namespace droplet {

void metropolis_sweep(SpinGrid& grid, double beta, Xoshiro256ss& rng) {
  const int L = grid.side;
  const long n = (long)L * L;
  for (long t = 0; t < n; ++t) {
    long idx = (long)rng.uniform_below((std::uint64_t)n);
    int x = (int)(idx % L), y = (int)(idx / L);
    int s = grid.spin(x, y);
    double dH = 2.0 * s * grid.neighbor_sum(x, y);
    if (dH <= 0.0 || rng.uniform01() < std::exp(-beta * dH))
      grid.set_spin(x, y, -s);
  }
}

void kawasaki_sweep(SpinGrid& grid, double beta, Xoshiro256ss& rng) {
  const int L = grid.side;
  const long n = (long)L * L;
  std::vector<std::int32_t> plus, minus;
  plus.reserve(n);
  for (long i = 0; i < n; ++i)
    (grid.spins[i] > 0 ? plus : minus).push_back((std::int32_t)i);
  if (plus.empty() || minus.empty()) return;  // monochromatic: no valid pairs

  for (long t = 0; t < n; ++t) {
    std::size_t pi = rng.uniform_below(plus.size());
    std::size_t mi = rng.uniform_below(minus.size());
    long p = plus[pi], m = minus[mi];
    int px = (int)(p % L), py = (int)(p / L);
    int mx = (int)(m % L), my = (int)(m / L) ;
    bool adjacent = std::abs(px - mx) + std::abs(py - my) == 1;
    // swap = flip both; the bond between them (if any) is unchanged
    double dH = 2.0 * grid.neighbor_sum(px, py) - 2.0 * grid.neighbor_sum(mx, my) +
                (adjacent ? 4.0 : 0.0);
    if (dH <= 0.0 || rng.uniform01() < std::exp(-beta * dH)) {
      grid.spins[p] = -1;
      grid.spins[m] = 1;
      plus[pi] = (std::int32_t)m;
      minus[mi] = (std::int32_t)p;
    }
  }
}

bool wolff_step(SpinGrid& grid, double beta, Xoshiro256ss& rng) {
  if (grid.boundary != Boundary::plus)
    throw std::invalid_argument("wolff_step: requires plus boundary");
  const int L = grid.side;
  const long n = (long)L * L;
  const double p_add = 1.0 - std::exp(-2.0 * beta);

  long seed = (long)rng.uniform_below((std::uint64_t)n);
  int s0 = grid.spins[seed];
  std::vector<std::uint8_t> in_cluster(n, 0);
  std::vector<std::int32_t> stack{(std::int32_t)seed}, members{(std::int32_t)seed};
  in_cluster[seed] = 1;
  bool touches_boundary = false;

  while (!stack.empty()) {
    long cur = stack.back();
    stack.pop_back();
    int x = (int)(cur % L), y = (int)(cur / L);
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      int nx = x + dx[d], ny = y + dy[d];
      if (!grid.in_box(nx, ny)) {
        // frozen plus boundary: an activated bond pins the cluster
        if (s0 == 1 && rng.uniform01() < p_add) touches_boundary = true;
        continue;
      }
      long ni = (long)ny * L + nx;
      if (in_cluster[ni] || grid.spins[ni] != s0) continue;
      if (rng.uniform01() < p_add) {
        in_cluster[ni] = 1;
        stack.push_back((std::int32_t)ni);
        members.push_back((std::int32_t)ni);
      }
    }
  }
  if (touches_boundary) return false;
  for (long i : members) grid.spins[i] = (std::int8_t)-s0;
  return true;
}

double integrated_autocorrelation_time(const std::vector<double>& series) {
  std::size_t n = series.size();
  if (n < 8) return 0.5;
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  var /= n;
  if (var <= 0.0) return 0.5;
  double tau = 0.5;
  std::size_t tmax = n / 4;
  for (std::size_t t = 1; t <= tmax; ++t) {
    double c = 0.0;
    for (std::size_t i = 0; i + t < n; ++i)
      c += (series[i] - mean) * (series[i + t] - mean);
    c /= (n - t) * var;
    tau += c;
    if ((double)t >= 6.0 * tau) break;  // Sokal window
    if (c < 0.0) break;
  }
  return std::max(tau, 0.5);
}

namespace {

struct SeriesStats {
  double mean, var, se_mean, tau;
};

SeriesStats series_stats(const std::vector<double>& s) {
  std::size_t n = s.size();
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : s) var += (v - mean) * (v - mean);
  var /= (n > 1 ? n - 1 : 1);
  double tau = integrated_autocorrelation_time(s);
  double se = std::sqrt(2.0 * tau * var / n);
  return {mean, var, se, tau};
}

}  // namespace

BulkEstimates estimate_bulk(double beta, int L, const ChainParams& params) {
  if (beta <= kBetaCritical)
    std::fprintf(stderr,
                 "estimate_bulk: warning: beta=%.6f is not above beta_c=%.6f; "
                 "bulk quantities are ill-defined\n",
                 beta, kBetaCritical);
  SpinGrid grid = new_grid(L, Boundary::plus, Fill::AllPlus());
  Xoshiro256ss rng = derive_stream(params.seed, 0);

  auto sweep = [&]() {
    metropolis_sweep(grid, beta, rng);
    wolff_step(grid, beta, rng);
  };
  for (long i = 0; i < params.thermalization; ++i) sweep();

  std::vector<double> ms;
  ms.reserve(params.sweeps / std::max<long>(params.sample_stride, 1) + 1);
  for (long i = 0; i < params.sweeps; ++i) {
    sweep();
    if ((i + 1) % params.sample_stride == 0)
      ms.push_back((double)total_magnetization(grid));
  }
  if (ms.size() < 16) throw std::invalid_argument("estimate_bulk: too few samples");

  long n2 = (long)(ms.size() / 2);
  SeriesStats h1 = series_stats({ms.begin(), ms.begin() + n2});
  SeriesStats h2 = series_stats({ms.begin() + n2, ms.end()});
  double comb = std::sqrt(h1.se_mean * h1.se_mean + h2.se_mean * h2.se_mean);
  if (std::abs(h1.mean - h2.mean) > 5.0 * comb)
    throw std::runtime_error("estimate_bulk: split-half consistency check failed");

  SeriesStats all = series_stats(ms);
  double vol = (double)L * L;
  BulkEstimates est;
  est.beta = beta;
  est.L = L;
  est.m_star_hat = all.mean / vol;
  est.m_star_err = all.se_mean / vol;
  est.chi_hat = all.var / vol;
  est.chi_err = all.var / vol * std::sqrt(4.0 * all.tau / ms.size());
  return est;
}

CanonicalSampler::CanonicalSampler(const ChainParams& params, int L)
    : params_(params), rng_(derive_stream(params.seed, 1)) {
  if (!params.target_M)
    throw std::invalid_argument("CanonicalSampler: target_M required");
  long n = (long)L * L;
  long M = *params.target_M;
  if (M < -n || M > n || ((n - M) % 2) != 0)
    throw std::invalid_argument("CanonicalSampler: target_M not an allowed value");
  long k = (n - M) / 2;
  grid_ = new_grid(L, Boundary::plus, Fill::KMinus(k, params.seed));
}

const SpinGrid& CanonicalSampler::next() {
  long sweeps = started_ ? params_.sample_stride : params_.thermalization;
  started_ = true;
  for (long i = 0; i < sweeps; ++i) kawasaki_sweep(grid_, params_.beta, rng_);
  return grid_;
}

std::vector<SpinGrid> sample_canonical(const ChainParams& params, int L, long n_samples) {
  CanonicalSampler s(params, L);
  std::vector<SpinGrid> out;
  out.reserve(n_samples);
  for (long i = 0; i < n_samples; ++i) out.push_back(s.next());
  return out;
}

}  // namespace droplet
