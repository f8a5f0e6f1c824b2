// Command-line front end for the droplet toolkit.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "droplet/enum_oracle.hpp"
#include "droplet/experiment.hpp"
#include "droplet/sampler.hpp"
#include "droplet/variational.hpp"
#include "droplet/wulff.hpp"

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_or_print(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    out << text;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D Ising droplet-formation toolkit"};
  app.require_subcommand(1);

  // phi: variational curve over a delta range
  auto* phi_cmd = app.add_subcommand("phi", "rate-function minima over a delta range");
  int phi_d = 2;
  double d_from = 0.0, d_to = 3.0, d_step = 0.01;
  std::string phi_out;
  phi_cmd->add_option("--d", phi_d, "dimension (>= 2)");
  phi_cmd->add_option("--delta-from", d_from);
  phi_cmd->add_option("--delta-to", d_to);
  phi_cmd->add_option("--step", d_step);
  phi_cmd->add_option("-o,--out", phi_out, "output CSV path (default stdout)");

  // tau: surface tension estimates
  auto* tau_cmd = app.add_subcommand("tau", "surface tension via dual-temperature strips");
  double tau_beta = 0.7;
  std::string widths = "6..12";
  std::string tau_out;
  tau_cmd->add_option("--beta", tau_beta);
  tau_cmd->add_option("--widths", widths, "strip width range, e.g. 6..12");
  tau_cmd->add_option("-o,--out", tau_out, "output CSV path (default stdout)");

  // wulff: shape + w1
  auto* wulff_cmd = app.add_subcommand("wulff", "Wulff shape and boundary energy");
  double wulff_beta = 0.7;
  int wulff_n = 4096;
  bool wulff_const = false;
  double wulff_tau0 = 1.0;
  std::string wulff_out;
  wulff_cmd->add_option("--beta", wulff_beta);
  wulff_cmd->add_option("--n", wulff_n, "number of half-plane directions");
  wulff_cmd->add_flag("--constant", wulff_const, "use constant tau instead of estimates");
  wulff_cmd->add_option("--tau0", wulff_tau0, "constant tau value");
  wulff_cmd->add_option("-o,--out", wulff_out, "output JSON path (default stdout)");

  // bulk: m*, chi
  auto* bulk_cmd = app.add_subcommand("bulk", "estimate m* and chi at (beta, L)");
  double bulk_beta = 0.7;
  int bulk_L = 64;
  long bulk_sweeps = 40000, bulk_therm = 4000, bulk_stride = 4;
  std::uint64_t bulk_seed = 1;
  bulk_cmd->add_option("--beta", bulk_beta);
  bulk_cmd->add_option("--L", bulk_L);
  bulk_cmd->add_option("--sweeps", bulk_sweeps);
  bulk_cmd->add_option("--thermalization", bulk_therm);
  bulk_cmd->add_option("--stride", bulk_stride);
  bulk_cmd->add_option("--seed", bulk_seed);

  // sweep: the droplet experiment
  auto* sweep_cmd = app.add_subcommand("sweep", "canonical droplet sweep from a config file");
  std::string sweep_config, sweep_out_dir = "sweep_out";
  sweep_cmd->add_option("--config", sweep_config)->required();
  sweep_cmd->add_option("--out-dir", sweep_out_dir);

  // enumerate: exact small-lattice law
  auto* enum_cmd = app.add_subcommand("enumerate", "exact magnetization law on a tiny lattice");
  int enum_L = 4;
  double enum_beta = 0.6;
  std::string enum_boundary = "plus";
  std::string enum_out;
  enum_cmd->add_option("--L", enum_L, "side, at most 5");
  enum_cmd->add_option("--beta", enum_beta);
  enum_cmd->add_option("--boundary", enum_boundary, "plus|minus|free");
  enum_cmd->add_option("-o,--out", enum_out, "output CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*phi_cmd) {
      std::ostringstream os;
      os << "delta,d,phi_star,lambda_delta,lambda_plus\n";
      long steps = d_step > 0 ? (long)std::floor((d_to - d_from) / d_step + 1e-9) : 0;
      for (long i = 0; i <= steps; ++i) {
        double delta = d_from + i * d_step;
        droplet::PhiSolution sol = droplet::minimize_phi({delta, phi_d});
        double lam = sol.lambda_delta ? *sol.lambda_delta
                     : (sol.minimizers.empty() ? 0.0 : sol.minimizers.back());
        os << fmt_g(delta) << ',' << phi_d << ',' << fmt_g(sol.phi_star) << ','
           << fmt_g(lam) << ',';
        if (sol.lambda_plus) os << fmt_g(*sol.lambda_plus);
        os << '\n';
      }
      write_or_print(phi_out, os.str());
    } else if (*tau_cmd) {
      int lo = 6, hi = 12;
      if (std::sscanf(widths.c_str(), "%d..%d", &lo, &hi) != 2)
        throw std::runtime_error("bad --widths, expected LO..HI");
      std::ostringstream os;
      os << "direction,width,tau\n";
      for (auto [k1, k2] : {std::pair{1, 0}, std::pair{1, 1}}) {
        droplet::TauEstimate est = droplet::estimate_tau(tau_beta, k1, k2, hi);
        for (auto [w, t] : est.per_width)
          os << k1 << k2 << ',' << w << ',' << fmt_g(t) << '\n';
        os << k1 << k2 << ",extrapolated," << fmt_g(est.value) << '\n';
        os << k1 << k2 << ",error," << fmt_g(est.error) << '\n';
      }
      write_or_print(tau_out, os.str());
    } else if (*wulff_cmd) {
      droplet::SurfaceTension tau =
          wulff_const ? droplet::SurfaceTension::constant(wulff_tau0)
                      : droplet::dual_estimated_tau(wulff_beta);
      droplet::WulffShape W = droplet::build_wulff(tau, wulff_n);
      std::ostringstream os;
      os << "{\"w1\":" << fmt_g(W.w1) << ",\"n_directions\":" << W.n_directions
         << ",\"vertices\":[";
      for (std::size_t i = 0; i < W.polygon.vertices.size(); ++i) {
        if (i) os << ',';
        os << '[' << fmt_g(W.polygon.vertices[i].x) << ',' << fmt_g(W.polygon.vertices[i].y)
           << ']';
      }
      os << "]}\n";
      write_or_print(wulff_out, os.str());
    } else if (*bulk_cmd) {
      droplet::ChainParams p;
      p.beta = bulk_beta;
      p.sweeps = bulk_sweeps;
      p.thermalization = bulk_therm;
      p.sample_stride = bulk_stride;
      p.seed = bulk_seed;
      droplet::BulkEstimates est = droplet::estimate_bulk(bulk_beta, bulk_L, p);
      std::cout << "m_star," << fmt_g(est.m_star_hat) << ',' << fmt_g(est.m_star_err) << '\n'
                << "chi," << fmt_g(est.chi_hat) << ',' << fmt_g(est.chi_err) << '\n';
    } else if (*sweep_cmd) {
      droplet::ExperimentConfig cfg = droplet::load_config(sweep_config);
      droplet::SweepSummary s = droplet::run_sweep(cfg, sweep_out_dir);
      std::cout << droplet::summary_csv(s);
      for (const auto& r : s.rows)
        if (r.aborted) return 2;
    } else if (*enum_cmd) {
      droplet::Boundary b = droplet::Boundary::plus;
      if (enum_boundary == "minus") b = droplet::Boundary::minus;
      else if (enum_boundary == "free") b = droplet::Boundary::free_bc;
      else if (enum_boundary != "plus") throw std::runtime_error("bad --boundary");
      droplet::ExactLaw law = droplet::enumerate_distribution(enum_L, enum_beta, b);
      std::ostringstream os;
      os << "M,pmf\n";
      for (const auto& [M, p] : law.magnetization_pmf)
        os << M << ',' << fmt_g(p) << '\n';
      os << "log_Z," << fmt_g(law.log_Z) << '\n';
      write_or_print(enum_out, os.str());
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
