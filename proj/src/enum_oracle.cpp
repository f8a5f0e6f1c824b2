#include "droplet/enum_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace droplet {

namespace {

constexpr int kMaxEnumSide = 5;
constexpr int kPartitions = 8;  // canonical range split, independent of thread count

// Streaming log-sum-exp accumulator, shifted by the running maximum.
struct LogAcc {
  double mx = -std::numeric_limits<double>::infinity();
  double sum = 0.0;

  void add(double w) {
    if (w <= mx) {
      sum += std::exp(w - mx);
    } else {
      sum = sum * std::exp(mx - w) + 1.0;
      mx = w;
    }
  }
  void merge(const LogAcc& o) {
    if (o.sum == 0.0) return;
    if (mx >= o.mx) {
      sum += o.sum * std::exp(o.mx - mx);
    } else {
      sum = sum * std::exp(mx - o.mx) + o.sum;
      mx = o.mx;
    }
  }
  bool empty() const { return sum == 0.0; }
  double log_value() const { return mx + std::log(sum); }
};

struct GrayWalker {
  int L;
  long n;
  Boundary boundary;
  SpinGrid grid;
  double H = 0.0;
  long M = 0;

  GrayWalker(int side, Boundary b) : L(side), n((long)side * side), boundary(b) {
    grid = new_grid(side, b, Fill::AllPlus());
  }

  void init_at(std::uint64_t i) {
    std::uint64_t g = i ^ (i >> 1);
    for (long t = 0; t < n; ++t)
      grid.spins[t] = (g >> t) & 1ULL ? -1 : 1;
    M = total_magnetization(grid);
    H = 0.0;
    for (int y = 0; y < L; ++y)
      for (int x = 0; x < L; ++x) {
        int s = grid.spin(x, y);
        H -= s * grid.spin_or_boundary(x + 1, y);
        H -= s * grid.spin_or_boundary(x, y + 1);
        if (x == 0) H -= s * grid.spin_or_boundary(-1, y);
        if (y == 0) H -= s * grid.spin_or_boundary(x, -1);
      }
  }

  // advance from configuration i-1 to i
  void step(std::uint64_t i) {
    int t = std::countr_zero(i);
    int x = t % L, y = t / L;
    int s = grid.spin(x, y);
    H += 2.0 * s * grid.neighbor_sum(x, y);
    M -= 2 * s;
    grid.set_spin(x, y, -s);
  }
};

void check_enum_pre(int L) {
  if (L < 1 || L > kMaxEnumSide)
    throw std::invalid_argument("enum_oracle: exact enumeration limited to L <= 5");
}

template <class Fn>
void run_partitioned(int L, Boundary boundary, int n_workers, const Fn& body) {
  std::uint64_t total = 1ULL << ((long)L * L);
  std::uint64_t chunk = (total + kPartitions - 1) / kPartitions;
  std::vector<std::thread> threads;
  std::vector<int> parts;
  for (int p = 0; p < kPartitions; ++p) parts.push_back(p);
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t idx = cursor.fetch_add(1);
      if (idx >= parts.size()) break;
      int p = parts[idx];
      std::uint64_t lo = (std::uint64_t)p * chunk;
      std::uint64_t hi = std::min(total, lo + chunk);
      if (lo >= hi) continue;
      GrayWalker gw(L, boundary);
      gw.init_at(lo);
      body(p, gw, lo, hi);
    }
  };
  int nt = std::max(1, std::min(n_workers, kPartitions));
  for (int t = 0; t < nt; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
}

int hardware_workers() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : (int)hc;
}

}  // namespace

void for_each_configuration(int L, Boundary boundary,
                            const std::function<void(const SpinGrid&, double, long)>& fn) {
  check_enum_pre(L);
  GrayWalker gw(L, boundary);
  std::uint64_t total = 1ULL << ((long)L * L);
  gw.init_at(0);
  fn(gw.grid, gw.H, gw.M);
  for (std::uint64_t i = 1; i < total; ++i) {
    gw.step(i);
    fn(gw.grid, gw.H, gw.M);
  }
}

ExactLaw enumerate_distribution(int L, double beta, Boundary boundary) {
  check_enum_pre(L);
  long n = (long)L * L;
  std::vector<std::vector<LogAcc>> buckets(kPartitions, std::vector<LogAcc>(n + 1));

  run_partitioned(L, boundary, hardware_workers(),
                  [&](int p, GrayWalker& gw, std::uint64_t lo, std::uint64_t hi) {
                    auto& acc = buckets[p];
                    acc[(gw.M + n) / 2].add(-beta * gw.H);
                    for (std::uint64_t i = lo + 1; i < hi; ++i) {
                      gw.step(i);
                      acc[(gw.M + n) / 2].add(-beta * gw.H);
                    }
                  });

  std::vector<LogAcc> merged(n + 1);
  for (int p = 0; p < kPartitions; ++p)
    for (long k = 0; k <= n; ++k) merged[k].merge(buckets[p][k]);

  LogAcc z;
  for (long k = 0; k <= n; ++k)
    if (!merged[k].empty()) z.add(merged[k].log_value());

  ExactLaw law;
  law.L = L;
  law.beta = beta;
  law.boundary = boundary;
  law.log_Z = z.log_value();
  for (long k = 0; k <= n; ++k)
    if (!merged[k].empty())
      law.magnetization_pmf[2 * k - n] = std::exp(merged[k].log_value() - law.log_Z);
  return law;
}

double conditional_expectation(const ExactLaw& law, long M,
                               const std::function<double(const SpinGrid&)>& observable) {
  if (law.pmf(M) <= 0.0)
    throw std::invalid_argument("conditional_expectation: P(M) = 0 (disallowed M)");
  long n = (long)law.L * law.L;
  (void)n;

  struct NumAcc {
    double mx = -std::numeric_limits<double>::infinity();
    double sw = 0.0, swf = 0.0;
    void add(double w, double f) {
      if (w <= mx) {
        double e = std::exp(w - mx);
        sw += e;
        swf += e * f;
      } else {
        double e = std::exp(mx - w);
        sw = sw * e + 1.0;
        swf = swf * e + f;
        mx = w;
      }
    }
    void merge(const NumAcc& o) {
      if (o.sw == 0.0) return;
      if (mx >= o.mx) {
        double e = std::exp(o.mx - mx);
        sw += o.sw * e;
        swf += o.swf * e;
      } else {
        double e = std::exp(mx - o.mx);
        sw = sw * e + o.sw;
        swf = swf * e + o.swf;
        mx = o.mx;
      }
    }
  };

  std::vector<NumAcc> accs(kPartitions);
  double beta = law.beta;
  run_partitioned(law.L, law.boundary, hardware_workers(),
                  [&](int p, GrayWalker& gw, std::uint64_t lo, std::uint64_t hi) {
                    auto& acc = accs[p];
                    if (gw.M == M) acc.add(-beta * gw.H, observable(gw.grid));
                    for (std::uint64_t i = lo + 1; i < hi; ++i) {
                      gw.step(i);
                      if (gw.M == M) acc.add(-beta * gw.H, observable(gw.grid));
                    }
                  });
  NumAcc total;
  for (auto& a : accs) total.merge(a);
  return total.swf / total.sw;
}

namespace {

std::string contour_key(const Contour& g) {
  std::ostringstream os;
  for (const auto& p : g.vertices) os << p.x2 << ',' << p.y2 << ';';
  return os.str();
}

// bijective matching between contours and skeletons; sizes are tiny
bool matchable(const std::vector<std::vector<bool>>& ok, std::size_t m) {
  std::vector<int> match(m, -1);
  std::function<bool(std::size_t, std::vector<bool>&)> aug = [&](std::size_t u,
                                                                 std::vector<bool>& seen) {
    for (std::size_t v = 0; v < m; ++v) {
      if (!ok[u][v] || seen[v]) continue;
      seen[v] = true;
      if (match[v] < 0 || aug((std::size_t)match[v], seen)) {
        match[v] = (int)u;
        return true;
      }
    }
    return false;
  };
  for (std::size_t u = 0; u < m; ++u) {
    std::vector<bool> seen(m, false);
    if (!aug(u, seen)) return false;
  }
  return true;
}

}  // namespace

std::vector<double> skeleton_event_probabilities(
    const ExactLaw& law, const std::vector<std::vector<Skeleton>>& events, double s) {
  check_enum_pre(law.L);
  double beta = law.beta;
  std::size_t ne = events.size();

  // flatten skeletons for the per-contour compatibility cache
  std::vector<const Skeleton*> flat;
  std::vector<std::vector<std::size_t>> event_sk(ne);
  for (std::size_t e = 0; e < ne; ++e)
    for (const auto& S : events[e]) {
      event_sk[e].push_back(flat.size());
      flat.push_back(&S);
    }

  std::vector<std::vector<LogAcc>> accs(kPartitions, std::vector<LogAcc>(ne));

  run_partitioned(
      law.L, law.boundary, hardware_workers(),
      [&](int p, GrayWalker& gw, std::uint64_t lo, std::uint64_t hi) {
        std::unordered_map<std::string, std::vector<bool>> cache;
        auto compat_bits = [&](const Contour& g) -> const std::vector<bool>& {
          auto key = contour_key(g);
          auto it = cache.find(key);
          if (it != cache.end()) return it->second;
          std::vector<bool> bits(flat.size());
          for (std::size_t k = 0; k < flat.size(); ++k)
            bits[k] = check_compatible(g, *flat[k]);
          return cache.emplace(std::move(key), std::move(bits)).first->second;
        };
        auto visit = [&](const SpinGrid& grid, double H) {
          ContourSet cs = extract_contours(grid);
          std::vector<const Contour*> large;
          for (const auto& g : cs.contours)
            if (g.diameter >= s) large.push_back(&g);
          double w = -beta * H;
          for (std::size_t e = 0; e < ne; ++e) {
            const auto& sks = event_sk[e];
            if (large.size() != sks.size()) continue;
            bool ok;
            if (sks.empty()) {
              ok = true;
            } else {
              std::size_t m = sks.size();
              std::vector<std::vector<bool>> table(m, std::vector<bool>(m));
              for (std::size_t i = 0; i < m; ++i) {
                const auto& bits = compat_bits(*large[i]);
                for (std::size_t j = 0; j < m; ++j) table[i][j] = bits[sks[j]];
              }
              ok = matchable(table, m);
            }
            if (ok) accs[p][e].add(w);
          }
        };
        visit(gw.grid, gw.H);
        for (std::uint64_t i = lo + 1; i < hi; ++i) {
          gw.step(i);
          visit(gw.grid, gw.H);
        }
      });

  std::vector<double> out(ne, 0.0);
  for (std::size_t e = 0; e < ne; ++e) {
    LogAcc total;
    for (int p = 0; p < kPartitions; ++p) total.merge(accs[p][e]);
    out[e] = total.empty() ? 0.0 : std::exp(total.log_value() - law.log_Z);
  }
  return out;
}

double skeleton_event_probability(const ExactLaw& law, const std::vector<Skeleton>& skeletons,
                                  double s) {
  return skeleton_event_probabilities(law, {skeletons}, s)[0];
}

}  // namespace droplet
