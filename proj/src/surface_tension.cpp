#include "droplet/surface_tension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace droplet {

double dual_beta(double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("dual_beta: beta must be positive");
  // (1/2) log coth(beta), written to stay positive for large beta
  double e = std::exp(-2.0 * beta);
  return 0.5 * (std::log1p(e) - std::log1p(-e));
}

namespace {
double fold_quarter(double theta) {
  const double q = M_PI / 2.0;
  double t = std::fmod(theta, q);
  if (t < 0) t += q;
  return t;
}
}  // namespace

SurfaceTension SurfaceTension::constant(double tau0) {
  if (!(tau0 > 0.0)) throw std::invalid_argument("SurfaceTension: tau must be positive");
  SurfaceTension t;
  t.model_ = Model::constant;
  t.a_ = tau0;
  t.tau_min_ = tau0;
  return t;
}

SurfaceTension SurfaceTension::fourfold(double a, double b) {
  SurfaceTension t;
  t.model_ = Model::fourfold;
  t.a_ = a;
  t.b_ = b;
  t.tau_min_ = a - std::abs(b);
  if (!(t.tau_min_ > 0.0))
    throw std::invalid_argument("SurfaceTension: tau must be positive");
  return t;
}

SurfaceTension SurfaceTension::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.empty()) throw std::invalid_argument("SurfaceTension: empty table");
  for (auto& [th, v] : samples) {
    if (!(v > 0.0)) throw std::invalid_argument("SurfaceTension: tau must be positive");
    th = fold_quarter(th);
  }
  std::sort(samples.begin(), samples.end());
  SurfaceTension t;
  t.model_ = Model::tabulated;
  t.table_ = std::move(samples);
  t.tau_min_ = t.table_.front().second;
  for (const auto& [th, v] : t.table_) t.tau_min_ = std::min(t.tau_min_, v);
  return t;
}

double SurfaceTension::operator()(double theta) const {
  switch (model_) {
    case Model::constant:
      return a_;
    case Model::fourfold:
      return a_ + b_ * std::cos(4.0 * theta);
    default: {
      double t = fold_quarter(theta);
      const double period = M_PI / 2.0;
      // periodic linear interpolation on the folded table
      auto it = std::lower_bound(table_.begin(), table_.end(), std::make_pair(t, -1.0));
      std::size_t hi = it - table_.begin();
      std::size_t lo = hi == 0 ? table_.size() - 1 : hi - 1;
      if (hi == table_.size()) hi = 0;
      double th_lo = table_[lo].first;
      double th_hi = table_[hi].first;
      double span = th_hi - th_lo;
      double off = t - th_lo;
      if (span <= 0) span += period;
      if (off < 0) off += period;
      if (span <= 0) return table_[lo].second;
      double w = off / span;
      return (1 - w) * table_[lo].second + w * table_[hi].second;
    }
  }
}

void SurfaceTension::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("SurfaceTension: cannot open " + path);
  out << "theta,tau\n";
  char buf[64];
  if (model_ == Model::tabulated) {
    for (const auto& [th, v] : table_) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", th, v);
      out << buf;
    }
  } else {
    for (int i = 0; i < 64; ++i) {
      double th = i * (M_PI / 2.0) / 64;
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", th, (*this)(th));
      out << buf;
    }
  }
}

SurfaceTension SurfaceTension::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("SurfaceTension: cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::pair<double, double>> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    double th, v;
    if (is >> th >> v) samples.emplace_back(th, v);
  }
  return tabulated(std::move(samples));
}

// ---------------------------------------------------------------------------
// Strip transfer matrices at the dual temperature.

namespace {

using Vec = std::vector<double>;

int spin_of_bit(unsigned x, int j) { return (x >> j) & 1u ? -1 : 1; }

double renormalize(Vec& v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  double n = std::sqrt(n2);
  if (n > 0)
    for (double& x : v) x /= n;
  return n;
}

void project_parity(Vec& v, int W, bool odd) {
  unsigned mask = (1u << W) - 1;
  for (unsigned x = 0; x < v.size(); ++x) {
    unsigned xb = (~x) & mask;
    if (x >= xb) continue;
    double a = v[x], b = v[xb];
    if (odd) {
      v[x] = 0.5 * (a - b);
      v[xb] = -v[x];
    } else {
      v[x] = 0.5 * (a + b);
      v[xb] = v[x];
    }
  }
}

// Cylinder transfer matrix along an axis direction, symmetrized as
// D^(1/2) B D^(1/2) with D the intra-ring bond weights and B the product of
// single-site crossing weights.
struct AxisTM {
  int W;
  double ep, em;
  Vec sqrtD;

  AxisTM(int width, double beta_dual) : W(width) {
    ep = std::exp(beta_dual);
    em = std::exp(-beta_dual);
    sqrtD.resize(1u << W);
    for (unsigned x = 0; x < sqrtD.size(); ++x) {
      int e = 0;
      for (int j = 0; j < W; ++j) e += spin_of_bit(x, j) * spin_of_bit(x, (j + 1) % W);
      sqrtD[x] = std::exp(0.5 * beta_dual * e);
    }
  }

  void apply(Vec& v) const {
    for (unsigned x = 0; x < v.size(); ++x) v[x] *= sqrtD[x];
    for (int j = 0; j < W; ++j) {
      unsigned bit = 1u << j;
      for (unsigned x = 0; x < v.size(); ++x) {
        if (x & bit) continue;
        double a = v[x], b = v[x | bit];
        v[x] = ep * a + em * b;
        v[x | bit] = em * a + ep * b;
      }
    }
    for (unsigned x = 0; x < v.size(); ++x) v[x] *= sqrtD[x];
  }
};

// Diagonal (staircase) transfer matrix on a cylinder: every step couples the
// new spin at ring position j to the old spins at j and j-1.  All lattice
// bonds connect consecutive rows, so one step carries weight
// prod_j exp(b s'_j (s_j + s_{j-1})).  Applied with an auxiliary copy of the
// wrap bit so old values survive until used.
struct DiagTM {
  int W;
  double b;
  mutable Vec buf;  // 2^(W+1) scratch

  DiagTM(int width, double beta_dual) : W(width), b(beta_dual) {
    buf.resize(1u << (W + 1));
  }

  // forward step: new j couples old (j, j-1); aux holds old bit W-1
  void apply(Vec& v) const { apply_impl(v, false); }
  // transposed step: new j couples old (j, j+1); aux holds old bit 0
  void apply_transposed(Vec& v) const { apply_impl(v, true); }

 private:
  void apply_impl(Vec& v, bool transposed) const {
    unsigned n = 1u << W;
    int aux_src = transposed ? 0 : W - 1;
    for (unsigned x = 0; x < n; ++x) {
      unsigned a = (x >> aux_src) & 1u;
      buf[(a << W) | x] = v[x];
      buf[((a ^ 1u) << W) | x] = 0.0;
    }
    auto replace_bit = [&](int j, int spectator_bit, bool spectator_is_aux) {
      unsigned bit = 1u << j;
      unsigned m = 1u << (W + 1);
      for (unsigned u = 0; u < m; ++u) {
        if (u & bit) continue;
        int sp = spectator_is_aux ? ((u >> W) & 1u ? -1 : 1)
                                  : ((u >> spectator_bit) & 1u ? -1 : 1);
        double lo = buf[u], hi = buf[u | bit];
        // new spin +1 / -1 from old spin and spectator
        double wpp = std::exp(b * (1) * (1 + sp));
        double wpm = std::exp(b * (1) * (-1 + sp));
        double wmp = std::exp(b * (-1) * (1 + sp));
        double wmm = std::exp(b * (-1) * (-1 + sp));
        buf[u] = wpp * lo + wpm * hi;
        buf[u | bit] = wmp * lo + wmm * hi;
      }
    };
    if (!transposed) {
      for (int j = W - 1; j >= 1; --j) replace_bit(j, j - 1, false);
      replace_bit(0, -1, true);
    } else {
      for (int j = 0; j <= W - 2; ++j) replace_bit(j, j + 1, false);
      replace_bit(W - 1, -1, true);
    }
    for (unsigned x = 0; x < n; ++x) v[x] = buf[x] + buf[(1u << W) | x];
  }
};

struct PowerResult {
  double lambda;
  Vec vec;
};

template <class Apply>
PowerResult power_iterate(int W, const Apply& apply, bool odd_sector) {
  Vec v(1u << W);
  // start from a generic vector of the right parity
  for (unsigned x = 0; x < v.size(); ++x) v[x] = 1.0 + 1e-3 * ((x * 2654435761u) % 97);
  project_parity(v, W, odd_sector);
  renormalize(v);
  double lambda = 0.0;
  for (int it = 0; it < 40000; ++it) {
    apply(v);
    project_parity(v, W, odd_sector);
    double n = renormalize(v);
    if (it > 10 && std::abs(n - lambda) <= 1e-14 * std::abs(n)) {
      lambda = n;
      break;
    }
    lambda = n;
  }
  return {lambda, std::move(v)};
}

struct CorrSeries {
  std::vector<double> log_corr;  // index = transfer steps
  double step_len = 1.0;         // Euclidean distance per index
};

CorrSeries axis_correlations(double beta_dual, int W, int n_max) {
  AxisTM tm(W, beta_dual);
  auto apply = [&](Vec& v) { tm.apply(v); };
  auto [lambda0, psi0] = power_iterate(W, apply, false);
  int mid = W / 2;
  Vec u(psi0);
  for (unsigned x = 0; x < u.size(); ++x) u[x] *= spin_of_bit(x, mid);
  Vec w(u);
  CorrSeries cs;
  cs.step_len = 1.0;
  cs.log_corr.assign(n_max + 1, 0.0);
  double acc = 0.0;
  Vec v(u);
  for (int n = 1; n <= n_max; ++n) {
    tm.apply(v);
    project_parity(v, W, true);
    double nn = renormalize(v);
    acc += std::log(nn / lambda0);
    double d = 0.0;
    for (unsigned x = 0; x < v.size(); ++x) d += w[x] * v[x];
    cs.log_corr[n] = acc + std::log(std::max(d, 1e-300));
  }
  return cs;
}

CorrSeries diag_correlations(double beta_dual, int W, int n2_max) {
  DiagTM tm(W, beta_dual);
  auto applyR = [&](Vec& v) { tm.apply(v); };
  auto applyL = [&](Vec& v) { tm.apply_transposed(v); };
  auto [lambdaR, psiR] = power_iterate(W, applyR, false);
  auto [lambdaL, psiL] = power_iterate(W, applyL, false);
  (void)lambdaL;
  double overlap = 0.0;
  for (unsigned x = 0; x < psiR.size(); ++x) overlap += psiR[x] * psiL[x];

  int j0 = 0;
  Vec v(psiR);
  for (unsigned x = 0; x < v.size(); ++x) v[x] *= spin_of_bit(x, j0);
  CorrSeries cs;
  cs.step_len = std::sqrt(2.0);
  cs.log_corr.assign(n2_max + 1, 0.0);
  double acc = 0.0;
  for (int n = 1; n <= n2_max; ++n) {
    // one lattice step along the diagonal = two rows
    tm.apply(v);
    project_parity(v, W, true);
    acc += std::log(renormalize(v) / lambdaR);
    tm.apply(v);
    project_parity(v, W, true);
    acc += std::log(renormalize(v) / lambdaR);
    // the left-vector operator sits on row 0, so its ring position trails by n
    int j1 = ((j0 - n) % W + W) % W;
    double d = 0.0;
    for (unsigned x = 0; x < v.size(); ++x) d += psiL[x] * spin_of_bit(x, j1) * v[x];
    cs.log_corr[n] = acc + std::log(std::max(d / overlap, 1e-300));
  }
  return cs;
}

struct LineFit {
  double slope, intercept, r2;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0, ybar = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    double f = intercept + slope * xs[i];
    ss_res += (ys[i] - f) * (ys[i] - f);
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return {slope, intercept, r2};
}

}  // namespace

TauEstimate estimate_tau(double beta, int k1, int k2, int max_width, int r_lo, int r_hi) {
  if (!(beta > kBetaCritical))
    throw std::invalid_argument("estimate_tau: requires beta > beta_c");
  if (max_width < 6 || max_width > 14)
    throw std::invalid_argument("estimate_tau: strip width out of range");
  if (r_lo < 2 || r_hi <= r_lo) throw std::invalid_argument("estimate_tau: bad length range");
  int a1 = std::abs(k1), a2 = std::abs(k2);
  bool axis = (a1 == 1 && a2 == 0) || (a1 == 0 && a2 == 1);
  bool diag = a1 == 1 && a2 == 1;
  if (!axis && !diag)
    throw std::invalid_argument("estimate_tau: direction must be an axis or a diagonal");

  double bd = dual_beta(beta);
  double knorm = axis ? 1.0 : std::sqrt(2.0);

  TauEstimate est;
  std::vector<double> inv_w, tau_w;
  for (int W = std::max(4, max_width - 6); W <= max_width; W += 2) {
    CorrSeries cs;
    if (axis) {
      cs = axis_correlations(bd, W, r_hi + 2);
    } else {
      int n2 = (int)std::ceil((r_hi + 2) / std::sqrt(2.0));
      cs = diag_correlations(bd, W, n2);
    }
    std::vector<double> xs, ys;
    for (std::size_t n = 1; n < cs.log_corr.size(); ++n) {
      double dist = n * cs.step_len;
      if (dist < r_lo || dist > r_hi) continue;
      xs.push_back(dist);
      ys.push_back(cs.log_corr[n]);
    }
    if (xs.size() < 4) throw std::runtime_error("estimate_tau: too few fit points");
    LineFit f = fit_line(xs, ys);
    if (f.r2 < 0.999)
      throw std::runtime_error("estimate_tau: decay fit R^2 < 0.999 (beta too close to "
                               "critical or strips too narrow)");
    est.per_width.emplace_back(W, -f.slope);
    inv_w.push_back(1.0 / W);
    tau_w.push_back(-f.slope);
  }
  (void)knorm;  // distances already Euclidean

  LineFit rich = fit_line(inv_w, tau_w);
  est.value = rich.intercept;
  double spread = 0.0;
  for (std::size_t i = 0; i + 1 < tau_w.size(); ++i) {
    // pairwise Richardson extrapolants
    double w1 = 1.0 / inv_w[i], w2 = 1.0 / inv_w[i + 1];
    double ex = (tau_w[i + 1] * w2 - tau_w[i] * w1) / (w2 - w1);
    spread = std::max(spread, std::abs(ex - est.value));
  }
  spread = std::max(spread, std::abs(tau_w.back() - est.value));
  est.error = std::max(spread, 1e-9);
  return est;
}

SurfaceTension dual_estimated_tau(double beta, const TauSettings& st) {
  TauEstimate ax = estimate_tau(beta, 1, 0, st.max_width, st.r_lo, st.r_hi);
  TauEstimate dg = estimate_tau(beta, 1, 1, st.max_width, st.r_lo, st.r_hi);
  double a = 0.5 * (ax.value + dg.value);
  double b = 0.5 * (ax.value - dg.value);
  return SurfaceTension::fourfold(a, b);
}

}  // namespace droplet
