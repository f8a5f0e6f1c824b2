#include "droplet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "droplet/contour.hpp"
#include "droplet/rng.hpp"
#include "droplet/sampler.hpp"
#include "droplet/variational.hpp"

namespace droplet {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<double> parse_number_list(const std::string& s) {
  std::string body = trim(s);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']')
    throw std::invalid_argument("config: expected [ ... ] list");
  body = body.substr(1, body.size() - 2);
  std::vector<double> out;
  std::istringstream is(body);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    bool in_quote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quote = !in_quote;
      if (line[i] == '#' && !in_quote) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "beta") cfg.beta = std::stod(val);
      else if (key == "L") cfg.L = std::stoi(val);
      else if (key == "delta_values") cfg.delta_values = parse_number_list(val);
      else if (key == "K") cfg.K = std::stod(val);
      else if (key == "kappa") cfg.kappa = std::stod(val);
      else if (key == "epsilon") cfg.epsilon = std::stod(val);
      else if (key == "tau_source") {
        std::string v = strip_quotes(val);
        if (v == "constant") cfg.tau_source = ExperimentConfig::TauSource::constant;
        else if (v == "dual_estimated")
          cfg.tau_source = ExperimentConfig::TauSource::dual_estimated;
        else throw std::invalid_argument("config: bad tau_source '" + v + "'");
      } else if (key == "tau0") cfg.tau0 = std::stod(val);
      else if (key == "bulk_source") {
        std::string v = strip_quotes(val);
        if (v == "measured") cfg.bulk_source = ExperimentConfig::BulkSource::measured;
        else if (v == "provided") cfg.bulk_source = ExperimentConfig::BulkSource::provided;
        else throw std::invalid_argument("config: bad bulk_source '" + v + "'");
      } else if (key == "m_star") cfg.m_star = std::stod(val);
      else if (key == "chi") cfg.chi = std::stod(val);
      else if (key == "chains") cfg.chains = std::stoi(val);
      else if (key == "sweeps") cfg.sweeps = std::stol(val);
      else if (key == "thermalization") cfg.thermalization = std::stol(val);
      else if (key == "stride") cfg.stride = std::stol(val);
      else if (key == "seed") cfg.seed = (std::uint64_t)std::stoull(val);
      else if (key == "max_deficit_fraction") cfg.max_deficit_fraction = std::stod(val);
      else if (key == "n_directions") cfg.n_directions = std::stoi(val);
      else if (key == "bulk_sweeps") cfg.bulk_sweeps = std::stol(val);
      else if (key == "bulk_thermalization") cfg.bulk_thermalization = std::stol(val);
      else if (key == "bulk_stride") cfg.bulk_stride = std::stol(val);
      else if (key == "save_snapshots") cfg.save_snapshots = strip_quotes(val) == "true";
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  ": bad value for '" + key + "'");
    }
  }
  if (cfg.delta_values.empty())
    throw std::invalid_argument("config: delta_values must be nonempty");
  if (!(cfg.kappa > 0.0 && cfg.kappa < 1.0))
    throw std::invalid_argument("config: kappa must be in (0,1)");
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be > 0");
  if (!(cfg.K > 0.0)) throw std::invalid_argument("config: K must be > 0");
  return cfg;
}

double v_from_delta(double delta, double m_star, double chi, double w1, int L, double rho) {
  if (!(delta > 0.0 && m_star > 0.0 && chi > 0.0 && w1 > 0.0 && L > 0))
    throw std::invalid_argument("v_from_delta: all inputs must be positive");
  double v = std::pow(delta * chi * w1 * (double)L * L / (2.0 * m_star * m_star), 2.0 / 3.0);
  if (v >= rho * (double)L * L)
    throw std::invalid_argument("v_from_delta: deficit too large for the scaling regime");
  return v;
}

SampleRecord classify_events(const SpinGrid& grid, const EventContext& ctx,
                             const WulffShape& W) {
  SampleRecord rec;
  rec.M = total_magnetization(grid);
  ContourSet ext = external_contours(extract_contours(grid));

  std::vector<const Contour*> large;
  for (const auto& g : ext.contours)
    if (g.diameter >= ctx.s) large.push_back(&g);
  rec.n_s_large = (int)large.size();

  double thresh = ctx.kappa * std::sqrt(ctx.v_L);
  rec.event_A = true;
  rec.has_droplet = false;
  rec.min_s_large_diam = 0.0;
  for (const auto* g : large) {
    if (g->diameter <= thresh) rec.event_A = false;
    else rec.has_droplet = true;
    if (rec.min_s_large_diam == 0.0 || g->diameter < rec.min_s_large_diam)
      rec.min_s_large_diam = g->diameter;
  }

  if (large.empty()) {
    rec.event_B = true;  // vacuous
    return rec;
  }

  const Contour* gamma0 = large.front();
  for (const auto* g : large)
    if (g->interior_area > gamma0->interior_area) gamma0 = g;

  LargestDroplet ld;
  ld.volume = gamma0->interior_area;
  ld.diameter = gamma0->diameter;
  ld.lambda_hat = (double)ld.volume / ctx.v_L;
  std::vector<IPoint> region;
  region.reserve(gamma0->interior_sites.size());
  for (auto [x, y] : gamma0->interior_sites) region.push_back(IPoint{x, y});
  ld.shape_distance = fit_shape(region, W).best_distance;
  long msum = interior_magnetization(grid, *gamma0);
  ld.interior_mag_deviation =
      std::abs((double)msum + ctx.m_star * (double)gamma0->interior_sites.size());
  rec.largest = ld;

  if (large.size() > 1) {
    rec.event_B = false;
    return rec;
  }
  PhiSolution sol = minimize_phi({ctx.delta, 2});
  double lam = (double)ld.volume / ctx.v_L;
  // the volume condition, with the rate formula continued past lambda = 1
  double phi_lam = std::sqrt(std::max(lam, 0.0)) + ctx.delta * (1.0 - lam) * (1.0 - lam);
  bool hausbd = ld.shape_distance <= std::sqrt(ctx.epsilon * ctx.v_L) + 1e-12;
  bool volbd = phi_lam <= sol.phi_star + ctx.epsilon + 1e-12;
  bool magbd = ld.interior_mag_deviation <= ctx.epsilon * ctx.v_L + 1e-12;
  rec.event_B = hausbd && volbd && magbd;
  return rec;
}

std::pair<double, double> wilson_interval(long successes, long n, double z) {
  if (n <= 0) return {0.0, 1.0};
  double p = (double)successes / n;
  double z2 = z * z;
  double den = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / den;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / den;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

double quantile_sorted(const std::vector<double>& v, double p) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  double h = p * (v.size() - 1);
  std::size_t lo = (std::size_t)h;
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - lo) * (v[lo + 1] - v[lo]);
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ChainOutput {
  std::vector<SampleRecord> records;
};

}  // namespace

SweepSummary run_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (cfg.chains < 1) throw std::invalid_argument("run_sweep: chains must be >= 1");
  if (cfg.delta_values.empty())
    throw std::invalid_argument("run_sweep: delta_values must be nonempty");
  if (!(cfg.kappa > 0.0 && cfg.kappa < 1.0))
    throw std::invalid_argument("run_sweep: kappa must be in (0,1)");
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("run_sweep: epsilon must be > 0");
  std::filesystem::create_directories(out_dir);

  double m_star, chi;
  if (cfg.bulk_source == ExperimentConfig::BulkSource::measured) {
    ChainParams bp;
    bp.beta = cfg.beta;
    bp.sweeps = cfg.bulk_sweeps;
    bp.thermalization = cfg.bulk_thermalization;
    bp.sample_stride = cfg.bulk_stride;
    bp.seed = derive_seed(cfg.seed, 0xB01Dull);
    BulkEstimates bulk = estimate_bulk(cfg.beta, cfg.L, bp);
    m_star = bulk.m_star_hat;
    chi = bulk.chi_hat;
  } else {
    if (!(cfg.m_star > 0.0 && cfg.chi > 0.0))
      throw std::invalid_argument("run_sweep: provided bulk values must be positive");
    m_star = cfg.m_star;
    chi = cfg.chi;
  }

  SurfaceTension tau = cfg.tau_source == ExperimentConfig::TauSource::constant
                           ? SurfaceTension::constant(cfg.tau0)
                           : dual_estimated_tau(cfg.beta);
  WulffShape W = build_wulff(tau, cfg.n_directions);

  SweepSummary summary;
  summary.beta = cfg.beta;
  summary.L = cfg.L;
  summary.s = cfg.K * std::log((double)cfg.L);

  std::vector<std::string> record_lines;
  long n_per_chain = cfg.sweeps / std::max<long>(cfg.stride, 1);

  for (std::size_t di = 0; di < cfg.delta_values.size(); ++di) {
    double delta = cfg.delta_values[di];
    DeltaSummary row;
    row.delta = delta;
    row.w1 = W.w1;
    row.m_star = m_star;
    row.chi = chi;
    try {
      double v = v_from_delta(delta, m_star, chi, W.w1, cfg.L, cfg.max_deficit_fraction);
      DeficitSpec spec = deficit_target(m_star, cfg.L, v);
      row.v_L = v;
      row.target_M = spec.target_M;
      PhiSolution sol = minimize_phi({delta, 2});
      row.lambda_theory = sol.lambda_delta ? *sol.lambda_delta
                          : (sol.minimizers.empty() ? 0.0 : sol.minimizers.back());

      EventContext ctx{v, summary.s, cfg.kappa, cfg.epsilon, m_star, delta};

      std::vector<ChainOutput> outputs((std::size_t)cfg.chains);
      std::atomic<int> cursor{0};
      std::atomic<bool> failed{false};
      std::string fail_what;
      std::mutex fail_mu;
      auto worker = [&]() {
        for (;;) {
          int c = cursor.fetch_add(1);
          if (c >= cfg.chains || failed.load()) break;
          try {
            ChainParams p;
            p.beta = cfg.beta;
            p.thermalization = cfg.thermalization;
            p.sample_stride = cfg.stride;
            p.seed = derive_seed(cfg.seed, 0xC0ull + di * 1024 + (std::uint64_t)c);
            p.target_M = spec.target_M;
            CanonicalSampler sampler(p, cfg.L);
            auto& out = outputs[(std::size_t)c];
            out.records.reserve((std::size_t)n_per_chain);
            for (long i = 0; i < n_per_chain; ++i) {
              const SpinGrid& g = sampler.next();
              out.records.push_back(classify_events(g, ctx, W));
              if (cfg.save_snapshots) {
                std::string dir = out_dir + "/delta" + std::to_string(di) + "/" +
                                  std::to_string(c);
                std::filesystem::create_directories(dir);
                save_snapshot(g, dir + "/" + std::to_string(i) + ".isd");
              }
            }
          } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lk(fail_mu);
            failed = true;
            fail_what = e.what();
          }
        }
      };
      int nt = std::max(1, std::min<int>((int)std::thread::hardware_concurrency(),
                                         cfg.chains));
      std::vector<std::thread> threads;
      for (int t = 0; t < nt; ++t) threads.emplace_back(worker);
      for (auto& t : threads) t.join();
      if (failed) throw std::runtime_error(fail_what);

      std::vector<double> lambdas;
      std::vector<std::vector<double>> chain_lambdas((std::size_t)cfg.chains);
      long n_samples = 0, k_droplet = 0, k_a = 0, k_b = 0;
      for (int c = 0; c < cfg.chains; ++c) {
        const auto& recs = outputs[(std::size_t)c].records;
        for (std::size_t i = 0; i < recs.size(); ++i) {
          const SampleRecord& r = recs[i];
          ++n_samples;
          double lh = r.largest ? r.largest->lambda_hat : 0.0;
          lambdas.push_back(lh);
          chain_lambdas[(std::size_t)c].push_back(lh);
          k_droplet += r.has_droplet;
          k_a += r.event_A;
          k_b += r.event_B;

          nlohmann::json j;
          j["delta"] = delta;
          j["chain"] = c;
          j["index"] = (long)i;
          j["M"] = r.M;
          j["n_s_large"] = r.n_s_large;
          if (r.largest) {
            j["largest"] = {{"volume", r.largest->volume},
                            {"diameter", r.largest->diameter},
                            {"lambda_hat", r.largest->lambda_hat},
                            {"shape_distance", r.largest->shape_distance},
                            {"interior_mag_deviation", r.largest->interior_mag_deviation}};
          } else {
            j["largest"] = nullptr;
          }
          j["event_A"] = r.event_A;
          j["event_B"] = r.event_B;
          j["has_droplet"] = r.has_droplet;
          j["min_s_large_diam"] = r.min_s_large_diam;
          record_lines.push_back(j.dump());
        }
      }
      row.n_samples = n_samples;

      std::sort(lambdas.begin(), lambdas.end());
      row.lambda_hat_median = quantile_sorted(lambdas, 0.5);
      row.lambda_hat_iqr =
          quantile_sorted(lambdas, 0.75) - quantile_sorted(lambdas, 0.25);
      row.frac_droplet = n_samples ? (double)k_droplet / n_samples : 0.0;
      row.frac_A = n_samples ? (double)k_a / n_samples : 0.0;
      row.frac_B = n_samples ? (double)k_b / n_samples : 0.0;
      std::tie(row.frac_droplet_lo, row.frac_droplet_hi) =
          wilson_interval(k_droplet, n_samples);
      std::tie(row.frac_A_lo, row.frac_A_hi) = wilson_interval(k_a, n_samples);
      std::tie(row.frac_B_lo, row.frac_B_hi) = wilson_interval(k_b, n_samples);

      // bootstrap over chains for the median's error bar
      Xoshiro256ss brng = derive_stream(cfg.seed, 0xB007ull + di);
      std::vector<double> medians;
      for (int b = 0; b < 200; ++b) {
        std::vector<double> pool;
        for (int c = 0; c < cfg.chains; ++c) {
          std::size_t pick = brng.uniform_below((std::uint64_t)cfg.chains);
          const auto& cl = chain_lambdas[pick];
          pool.insert(pool.end(), cl.begin(), cl.end());
        }
        std::sort(pool.begin(), pool.end());
        medians.push_back(quantile_sorted(pool, 0.5));
      }
      double mm = 0;
      for (double m : medians) mm += m;
      mm /= medians.size();
      double mv = 0;
      for (double m : medians) mv += (m - mm) * (m - mm);
      row.lambda_hat_err = std::sqrt(mv / medians.size());
    } catch (const std::exception& e) {
      row.aborted = true;
      row.abort_reason = e.what();
      std::fprintf(stderr, "run_sweep: delta=%.6g aborted: %s\n", delta, e.what());
    }
    summary.rows.push_back(row);
  }

  std::ofstream csv(out_dir + "/summary.csv", std::ios::binary);
  csv << summary_csv(summary);
  std::ofstream jl(out_dir + "/records.jsonl", std::ios::binary);
  for (const auto& line : record_lines) jl << line << '\n';
  return summary;
}

std::string summary_csv(const SweepSummary& s) {
  std::ostringstream os;
  os << "delta,v_L,lambda_theory,lambda_hat_median,lambda_hat_iqr,frac_droplet,frac_A,"
        "frac_B,w1,m_star,chi\n";
  for (const auto& r : s.rows) {
    if (r.aborted) {
      os << fmt_g(r.delta) << ",nan,nan,nan,nan,nan,nan,nan," << fmt_g(r.w1) << ','
         << fmt_g(r.m_star) << ',' << fmt_g(r.chi) << '\n';
      continue;
    }
    os << fmt_g(r.delta) << ',' << fmt_g(r.v_L) << ',' << fmt_g(r.lambda_theory) << ','
       << fmt_g(r.lambda_hat_median) << ',' << fmt_g(r.lambda_hat_iqr) << ','
       << fmt_g(r.frac_droplet) << ',' << fmt_g(r.frac_A) << ',' << fmt_g(r.frac_B) << ','
       << fmt_g(r.w1) << ',' << fmt_g(r.m_star) << ',' << fmt_g(r.chi) << '\n';
  }
  return os.str();
}

}  // namespace droplet
