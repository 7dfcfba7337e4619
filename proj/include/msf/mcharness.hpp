#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "msf/dgp.hpp"
#include "msf/evtheory.hpp"

namespace msf::mcharness {

/// Grid sweep configuration. Cells are the stable members of the full
/// sigma_s x sigma_e x a x gamma product grid; unstable (a, gamma) pairs are
/// skipped silently, but a grid with no stable cell at all is rejected.
struct SweepConfig {
  std::vector<double> a_grid{-0.6, -0.3, 0.0, 0.3, 0.6};
  std::vector<double> gamma_grid{-0.6, -0.3, 0.0, 0.15, 0.3};
  std::vector<double> sigma_s_grid{1.0};
  std::vector<double> sigma_e_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  int n_train = 2000;
  int n_eval = 5000;
  int n_seeds = 50;
  int horizon = 2;
  int burn_in = 500;
  /// A cell fails when more than this fraction of its trials fail.
  double max_fail_frac = 0.10;

  void validate() const;  ///< throws std::invalid_argument
  long n_grid_cells() const;
  int count_stable_cells() const;
};

struct TrialResult {
  std::uint64_t seed = 0;
  int trial_index = 0;
  std::array<double, 2> fitted_one_step{};
  std::array<double, 2> fitted_direct{};
  std::array<double, 2> derived_recursive{};  ///< linear two-step map image
  double mse_one_step = 0.0;
  double mse_rec = 0.0;
  double mse_dir = 0.0;
  bool failed = false;
};

struct CellReport {
  long cell_index = -1;
  dgp::Ar2Params params;
  int n_seeds = 0;
  int n_failed = 0;

  evtheory::AleatoricFloors floors;

  // Theory side: analytic OLS covariance with the closed-form floors,
  // Jacobian at the mean fitted one-step coefficients, moments from the
  // evaluation series.
  double ev_theory_one = 0.0;
  double ev_theory_rec = 0.0;
  double ev_theory_dir = 0.0;
  double t_h_theory = 0.0;
  double delta_ev_theory = 0.0;

  // Empirical side: across-trial prediction variance on the evaluation
  // windows, plus the trace identity route through the empirical parameter
  // covariance.
  double ev_emp_one = 0.0;
  double ev_emp_rec = 0.0;
  double ev_emp_dir = 0.0;
  double ev_trace_one = 0.0;  ///< tr(empirical Sigma_b * Q)

  /// Pearson correlation between the per-evaluation-point theoretical
  /// variance and the per-point across-trial variance of the recursive
  /// strategy.
  double pearson_r = 0.0;

  /// || (a, gamma) - mean fitted one-step coefficients ||.
  double bias_distance = 0.0;

  double mse_one = 0.0;
  double mse_rec = 0.0;
  double mse_dir = 0.0;

  std::array<double, 2> mean_one_step{};
  // Upper-triangle entries (11, 12, 22) of the empirical covariances.
  std::array<double, 3> cov_one_step{};
  std::array<double, 3> cov_recursive{};
  std::array<double, 3> cov_direct{};

  std::vector<TrialResult> trials;
};

/// Across-trial prediction variance averaged over evaluation points.
/// `per_seed_predictions` holds one row per trial, one column per point.
double empirical_ev(const Eigen::MatrixXd& per_seed_predictions);

/// Pearson correlation; throws std::domain_error when either side has zero
/// variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Runs one grid cell: n_seeds independent training draws against one fixed
/// evaluation series. Seeds derive from cell_seed, so the report depends only
/// on (params, cfg, cell_seed). Throws std::runtime_error when more than
/// cfg.max_fail_frac of the trials fail.
CellReport run_cell(const dgp::Ar2Params& params, const SweepConfig& cfg,
                    std::uint64_t cell_seed);

struct NoiseConfigSummary {
  double sigma_s = 0.0;
  double sigma_e = 0.0;
  int n_cells = 0;
  int n_failed_cells = 0;
  /// Across-cell theory-vs-empirical correlations (NaN when undefined).
  double r_rec = 0.0;
  double r_dir = 0.0;
  double mean_bias_distance = 0.0;
  /// Winner maps: "recursive wins" analytically when the one-step floor is
  /// below the two-step floor, empirically when mse_rec < mse_dir.
  double prop_rec_wins_analytic = 0.0;
  double prop_rec_wins_empirical = 0.0;
  double winner_agreement = 0.0;
};

struct FailedCell {
  long cell_index = -1;
  dgp::Ar2Params params;
  std::string message;
};

struct SweepResult {
  SweepConfig cfg;
  std::uint64_t base_seed = 0;
  std::vector<CellReport> cells;  ///< ascending cell_index
  std::vector<NoiseConfigSummary> summaries;
  std::vector<FailedCell> failures;
};

/// Full sweep over the stable grid. Cell seeds derive from
/// (base_seed, flat index in the full product grid), so results are
/// byte-identical for any worker count.
SweepResult run_sweep(const SweepConfig& cfg, std::uint64_t base_seed,
                      int jobs = 1);

void write_cells_csv(std::ostream& os, const SweepResult& result);
void write_summary_json(std::ostream& os, const SweepResult& result);

}  // namespace msf::mcharness
