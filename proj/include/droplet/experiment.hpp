#pragma once

#include <optional>
#include <string>
#include <vector>

#include "droplet/lattice.hpp"
#include "droplet/wulff.hpp"

namespace droplet {

struct ExperimentConfig {
  double beta = 0.7;
  int L = 64;
  std::vector<double> delta_values;
  double K = 3.0;       // contour scale s = K ln L
  double kappa = 0.3;
  double epsilon = 0.1;
  enum class TauSource { constant, dual_estimated };
  TauSource tau_source = TauSource::dual_estimated;
  double tau0 = 1.0;    // for tau_source = constant
  enum class BulkSource { measured, provided };
  BulkSource bulk_source = BulkSource::measured;
  double m_star = 0.0;  // for bulk_source = provided
  double chi = 0.0;
  int chains = 4;
  long sweeps = 20000;
  long thermalization = 10000;
  long stride = 50;
  std::uint64_t seed = 1;
  double max_deficit_fraction = 0.25;
  int n_directions = 512;
  long bulk_sweeps = 40000;
  long bulk_thermalization = 4000;
  long bulk_stride = 4;
  bool save_snapshots = false;
};

/// Flat key = value file, TOML-compatible scalars plus [a, b, c] number lists.
ExperimentConfig load_config(const std::string& path);

/// Droplet-scale volume for a deficit parameter at finite L:
/// v = (delta chi w1 L^2 / (2 m*^2))^(2/3).  Rejects v >= rho L^2.
double v_from_delta(double delta, double m_star, double chi, double w1, int L,
                    double rho = 0.25);

struct LargestDroplet {
  long volume = 0;
  double diameter = 0.0;
  double lambda_hat = 0.0;
  double shape_distance = 0.0;
  double interior_mag_deviation = 0.0;
};

struct SampleRecord {
  long M = 0;
  int n_s_large = 0;  // external contours with diam >= s
  std::optional<LargestDroplet> largest;
  bool event_A = true;
  bool event_B = true;
  bool has_droplet = false;     // some s-large external contour with diam > kappa sqrt(v)
  double min_s_large_diam = 0.0;
};

struct EventContext {
  double v_L = 0.0;
  double s = 0.0;
  double kappa = 0.3;
  double epsilon = 0.1;
  double m_star = 1.0;
  double delta = 0.0;
};

SampleRecord classify_events(const SpinGrid& grid, const EventContext& ctx,
                             const WulffShape& W);

struct DeltaSummary {
  double delta = 0.0;
  double v_L = 0.0;
  double lambda_theory = 0.0;
  double lambda_hat_median = 0.0;
  double lambda_hat_iqr = 0.0;
  double lambda_hat_err = 0.0;  // bootstrap over chains
  double frac_droplet = 0.0, frac_droplet_lo = 0.0, frac_droplet_hi = 0.0;
  double frac_A = 0.0, frac_A_lo = 0.0, frac_A_hi = 0.0;
  double frac_B = 0.0, frac_B_lo = 0.0, frac_B_hi = 0.0;
  double w1 = 0.0;
  double m_star = 0.0;
  double chi = 0.0;
  long n_samples = 0;
  long target_M = 0;
  bool aborted = false;
  std::string abort_reason;
};

struct SweepSummary {
  std::vector<DeltaSummary> rows;
  double beta = 0.0;
  int L = 0;
  double s = 0.0;
};

/// Runs the canonical-sampling sweep over delta_values, classifies every
/// retained sample, and writes summary.csv and records.jsonl to out_dir.
/// A failing delta point is marked aborted rather than aborting the sweep.
SweepSummary run_sweep(const ExperimentConfig& cfg, const std::string& out_dir);

std::string summary_csv(const SweepSummary& s);

std::pair<double, double> wilson_interval(long successes, long n, double z = 1.96);

}  // namespace droplet
