#include "msf/mcharness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "json.hpp"
#include "msf/csvio.hpp"
#include "msf/parallel.hpp"
#include "msf/polypred.hpp"
#include "msf/rng.hpp"

namespace msf::mcharness {

namespace {

double mse_of(const Eigen::VectorXd& pred, const Eigen::VectorXd& target) {
  return (pred - target).squaredNorm() / static_cast<double>(target.size());
}

std::array<double, 3> upper_triangle(const Eigen::MatrixXd& m) {
  return {m(0, 0), m(0, 1), m(1, 1)};
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

void SweepConfig::validate() const {
  if (a_grid.empty() || gamma_grid.empty() || sigma_s_grid.empty() ||
      sigma_e_grid.empty())
    throw std::invalid_argument("sweep config: all grids must be non-empty");
  if (n_train < 10) throw std::invalid_argument("sweep config: n_train too small");
  if (n_eval < 10) throw std::invalid_argument("sweep config: n_eval too small");
  if (n_seeds < 2)
    throw std::invalid_argument("sweep config: n_seeds must be >= 2");
  if (horizon != 2)
    throw std::invalid_argument(
        "sweep config: the study is defined for horizon = 2");
  if (burn_in < 0) throw std::invalid_argument("sweep config: burn_in < 0");
  if (max_fail_frac < 0.0 || max_fail_frac > 1.0)
    throw std::invalid_argument("sweep config: max_fail_frac outside [0, 1]");
  for (double s : sigma_s_grid)
    if (s < 0.0) throw std::invalid_argument("sweep config: sigma_s < 0");
  for (double e : sigma_e_grid)
    if (e < 0.0) throw std::invalid_argument("sweep config: sigma_e < 0");
  if (count_stable_cells() == 0)
    throw std::invalid_argument("sweep config: no stable cells in the grid");
}

long SweepConfig::n_grid_cells() const {
  return static_cast<long>(sigma_s_grid.size()) *
         static_cast<long>(sigma_e_grid.size()) *
         static_cast<long>(a_grid.size()) *
         static_cast<long>(gamma_grid.size());
}

int SweepConfig::count_stable_cells() const {
  int stable = 0;
  for (double a : a_grid)
    for (double g : gamma_grid)
      if (dgp::is_stable(a, g)) ++stable;
  return stable * static_cast<int>(sigma_s_grid.size()) *
         static_cast<int>(sigma_e_grid.size());
}

double empirical_ev(const Eigen::MatrixXd& per_seed_predictions) {
  const Eigen::Index n_seeds = per_seed_predictions.rows();
  const Eigen::Index n_points = per_seed_predictions.cols();
  if (n_seeds < 2)
    throw std::invalid_argument("empirical_ev: need at least two seeds");
  if (n_points < 1)
    throw std::invalid_argument("empirical_ev: no evaluation points");
  const Eigen::RowVectorXd mean = per_seed_predictions.colwise().mean();
  const Eigen::MatrixXd centered = per_seed_predictions.rowwise() - mean;
  const double total = centered.squaredNorm() /
                       static_cast<double>(n_seeds - 1);
  return total / static_cast<double>(n_points);
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("pearson: length mismatch");
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("pearson: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::domain_error("pearson: zero variance makes the correlation undefined");
  return sxy / std::sqrt(sxx * syy);
}

CellReport run_cell(const dgp::Ar2Params& params, const SweepConfig& cfg,
                    std::uint64_t cell_seed) {
  cfg.validate();
  if (!dgp::is_stable(params))
    throw std::invalid_argument("run_cell: parameters outside the stability triangle");

  constexpr int kLagOrder = 2;
  CellReport report;
  report.params = params;
  report.n_seeds = cfg.n_seeds;
  report.floors = evtheory::aleatoric_floors(params);

  // One fixed evaluation series per cell; trials never touch its stream.
  const std::uint64_t eval_seed = derive_seed(cell_seed, 0, 0);
  const dgp::SeriesPair eval_series =
      dgp::simulate_ar2(params, cfg.n_eval, cfg.burn_in, eval_seed);
  const std::span<const double> eval(eval_series.observed);

  const Eigen::MatrixXd x_win = estimate::lag_window_matrix(eval, kLagOrder);
  const estimate::DesignMatrix design1 = estimate::build_design(eval, kLagOrder, 1);
  const estimate::DesignMatrix design2 = estimate::build_design(eval, kLagOrder, 2);

  const Eigen::Index n_points = x_win.rows();
  Eigen::MatrixXd pred_one(cfg.n_seeds, n_points);
  Eigen::MatrixXd pred_rec(cfg.n_seeds, n_points);
  Eigen::MatrixXd pred_dir(cfg.n_seeds, n_points);

  report.trials.resize(static_cast<std::size_t>(cfg.n_seeds));
  for (int t = 0; t < cfg.n_seeds; ++t) {
    TrialResult& trial = report.trials[static_cast<std::size_t>(t)];
    trial.trial_index = t;
    trial.seed = derive_seed(cell_seed, 1, static_cast<std::uint64_t>(t));
    try {
      const dgp::SeriesPair train =
          dgp::simulate_ar2(params, cfg.n_train, cfg.burn_in, trial.seed);
      const std::span<const double> tr(train.observed);
      const Eigen::VectorXd b =
          estimate::ols_fit(estimate::build_design(tr, kLagOrder, 1));
      const Eigen::VectorXd c =
          estimate::ols_fit(estimate::build_design(tr, kLagOrder, 2));
      trial.fitted_one_step = {b[0], b[1]};
      trial.fitted_direct = {c[0], c[1]};
      trial.derived_recursive = polypred::linear_two_step_map(trial.fitted_one_step);

      const Eigen::Vector2d bv(b[0], b[1]);
      const Eigen::Vector2d av(trial.derived_recursive[0], trial.derived_recursive[1]);
      const Eigen::Vector2d cv(c[0], c[1]);
      pred_one.row(t) = (x_win * bv).transpose();
      pred_rec.row(t) = (x_win * av).transpose();
      pred_dir.row(t) = (x_win * cv).transpose();

      trial.mse_one_step = mse_of(design1.rows * bv, design1.targets);
      trial.mse_rec = mse_of(design2.rows * av, design2.targets);
      trial.mse_dir = mse_of(design2.rows * cv, design2.targets);
    } catch (const estimate::SingularFitError&) {
      trial.failed = true;
    }
  }

  std::vector<int> ok;
  for (int t = 0; t < cfg.n_seeds; ++t)
    if (!report.trials[static_cast<std::size_t>(t)].failed) ok.push_back(t);
  report.n_failed = cfg.n_seeds - static_cast<int>(ok.size());
  if (static_cast<double>(report.n_failed) >
      cfg.max_fail_frac * static_cast<double>(cfg.n_seeds))
    throw std::runtime_error("run_cell: " + std::to_string(report.n_failed) +
                             " of " + std::to_string(cfg.n_seeds) +
                             " trials failed (singular fits)");
  if (ok.size() < 2)
    throw std::runtime_error("run_cell: fewer than two successful trials");

  // Compact the prediction matrices to successful trials.
  Eigen::MatrixXd ok_one(ok.size(), n_points), ok_rec(ok.size(), n_points),
      ok_dir(ok.size(), n_points);
  std::vector<Eigen::VectorXd> b_samples, a_samples, c_samples;
  b_samples.reserve(ok.size());
  a_samples.reserve(ok.size());
  c_samples.reserve(ok.size());
  double mse_one = 0.0, mse_rec = 0.0, mse_dir = 0.0;
  Eigen::Vector2d b_mean = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < ok.size(); ++i) {
    const TrialResult& trial = report.trials[static_cast<std::size_t>(ok[i])];
    ok_one.row(static_cast<Eigen::Index>(i)) = pred_one.row(ok[i]);
    ok_rec.row(static_cast<Eigen::Index>(i)) = pred_rec.row(ok[i]);
    ok_dir.row(static_cast<Eigen::Index>(i)) = pred_dir.row(ok[i]);
    b_samples.push_back(Eigen::Vector2d(trial.fitted_one_step[0],
                                        trial.fitted_one_step[1]));
    a_samples.push_back(Eigen::Vector2d(trial.derived_recursive[0],
                                        trial.derived_recursive[1]));
    c_samples.push_back(Eigen::Vector2d(trial.fitted_direct[0],
                                        trial.fitted_direct[1]));
    mse_one += trial.mse_one_step;
    mse_rec += trial.mse_rec;
    mse_dir += trial.mse_dir;
    b_mean += b_samples.back();
  }
  const double n_ok = static_cast<double>(ok.size());
  report.mse_one = mse_one / n_ok;
  report.mse_rec = mse_rec / n_ok;
  report.mse_dir = mse_dir / n_ok;
  b_mean /= n_ok;
  report.mean_one_step = {b_mean[0], b_mean[1]};
  report.bias_distance =
      std::hypot(params.a - b_mean[0], params.gamma - b_mean[1]);

  const estimate::ParamCov cov_b = estimate::empirical_param_cov(b_samples);
  const estimate::ParamCov cov_a = estimate::empirical_param_cov(a_samples);
  const estimate::ParamCov cov_c = estimate::empirical_param_cov(c_samples);
  report.cov_one_step = upper_triangle(cov_b.sigma);
  report.cov_recursive = upper_triangle(cov_a.sigma);
  report.cov_direct = upper_triangle(cov_c.sigma);

  report.ev_emp_one = empirical_ev(ok_one);
  report.ev_emp_rec = empirical_ev(ok_rec);
  report.ev_emp_dir = empirical_ev(ok_dir);

  // Theory side. The composition is structural (every lag is a parameter);
  // alpha and J are evaluated at the mean fitted coefficients.
  const polypred::CompositionResult comp =
      polypred::compose(polypred::PolyPredictor::linear({1.0, 1.0}), cfg.horizon);
  const estimate::MomentMatrix q = estimate::second_moment(x_win);
  const estimate::MomentMatrix q_tilde = estimate::composed_second_moment(eval, comp);
  const Eigen::MatrixXd jac = comp.jacobian_at(b_mean);

  const estimate::ParamCov sigma_one =
      estimate::ols_param_cov(report.floors.sigma2_eps1, cfg.n_train, q);
  const estimate::ParamCov sigma_two =
      estimate::ols_param_cov(report.floors.sigma2_eps2, cfg.n_train, q);
  report.ev_theory_one = evtheory::ev_direct(sigma_one, q);
  report.ev_theory_rec = evtheory::ev_recursive(jac, sigma_one, q_tilde);
  report.ev_theory_dir = evtheory::ev_direct(sigma_two, q);
  report.t_h_theory = evtheory::amplification(jac, sigma_one, q_tilde, q);
  report.delta_ev_theory =
      evtheory::ev_delta(report.ev_theory_rec, report.ev_theory_dir);

  report.ev_trace_one = (cov_b.sigma * q.m).trace();

  // Per-point theory-vs-empirical variance correlation for the recursive
  // strategy.
  const Eigen::MatrixXd m_alpha = jac * sigma_one.sigma * jac.transpose();
  std::vector<double> v_theory(static_cast<std::size_t>(n_points));
  std::vector<double> v_emp(static_cast<std::size_t>(n_points));
  const Eigen::RowVectorXd rec_mean = ok_rec.colwise().mean();
  for (Eigen::Index i = 0; i < n_points; ++i) {
    const Eigen::Vector2d x = x_win.row(i).transpose();
    v_theory[static_cast<std::size_t>(i)] = x.dot(m_alpha * x);
    const Eigen::VectorXd centered = ok_rec.col(i).array() - rec_mean[i];
    v_emp[static_cast<std::size_t>(i)] = centered.squaredNorm() / (n_ok - 1.0);
  }
  report.pearson_r = pearson(v_theory, v_emp);

  return report;
}

SweepResult run_sweep(const SweepConfig& cfg, std::uint64_t base_seed, int jobs) {
  cfg.validate();

  struct CellJob {
    long flat_index;
    dgp::Ar2Params params;
  };
  std::vector<CellJob> jobs_list;
  long flat = 0;
  for (double sigma_s : cfg.sigma_s_grid)
    for (double sigma_e : cfg.sigma_e_grid)
      for (double a : cfg.a_grid)
        for (double gamma : cfg.gamma_grid) {
          if (dgp::is_stable(a, gamma))
            jobs_list.push_back(
                CellJob{flat, dgp::Ar2Params{a, gamma, sigma_s, sigma_e}});
          ++flat;
        }

  std::vector<std::optional<CellReport>> slots(jobs_list.size());
  std::vector<std::optional<FailedCell>> failed(jobs_list.size());
  parallel_for(jobs_list.size(), jobs, [&](std::size_t i) {
    const CellJob& job = jobs_list[i];
    const std::uint64_t cell_seed =
        derive_seed(base_seed, static_cast<std::uint64_t>(job.flat_index));
    try {
      CellReport report = run_cell(job.params, cfg, cell_seed);
      report.cell_index = job.flat_index;
      slots[i] = std::move(report);
    } catch (const std::runtime_error& e) {
      failed[i] = FailedCell{job.flat_index, job.params, e.what()};
    }
  });

  SweepResult result;
  result.cfg = cfg;
  result.base_seed = base_seed;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) result.cells.push_back(std::move(*slots[i]));
    if (failed[i]) result.failures.push_back(std::move(*failed[i]));
  }

  // Per-(sigma_s, sigma_e) summaries, in grid order.
  for (double sigma_s : cfg.sigma_s_grid) {
    for (double sigma_e : cfg.sigma_e_grid) {
      NoiseConfigSummary summary;
      summary.sigma_s = sigma_s;
      summary.sigma_e = sigma_e;
      std::vector<double> theory_rec, emp_rec, theory_dir, emp_dir;
      int agree = 0;
      for (const CellReport& cell : result.cells) {
        if (cell.params.sigma_s != sigma_s || cell.params.sigma_e != sigma_e)
          continue;
        ++summary.n_cells;
        theory_rec.push_back(cell.ev_theory_rec);
        emp_rec.push_back(cell.ev_emp_rec);
        theory_dir.push_back(cell.ev_theory_dir);
        emp_dir.push_back(cell.ev_emp_dir);
        summary.mean_bias_distance += cell.bias_distance;
        const bool analytic_rec_wins =
            cell.floors.sigma2_eps1 < cell.floors.sigma2_eps2;
        const bool empirical_rec_wins = cell.mse_rec < cell.mse_dir;
        summary.prop_rec_wins_analytic += analytic_rec_wins ? 1.0 : 0.0;
        summary.prop_rec_wins_empirical += empirical_rec_wins ? 1.0 : 0.0;
        if (analytic_rec_wins == empirical_rec_wins) ++agree;
      }
      for (const FailedCell& fc : result.failures)
        if (fc.params.sigma_s == sigma_s && fc.params.sigma_e == sigma_e)
          ++summary.n_failed_cells;
      if (summary.n_cells > 0) {
        const double n = summary.n_cells;
        summary.mean_bias_distance /= n;
        summary.prop_rec_wins_analytic /= n;
        summary.prop_rec_wins_empirical /= n;
        summary.winner_agreement = agree / n;
      }
      try {
        summary.r_rec = pearson(theory_rec, emp_rec);
      } catch (const std::exception&) {
        summary.r_rec = nan_value();
      }
      try {
        summary.r_dir = pearson(theory_dir, emp_dir);
      } catch (const std::exception&) {
        summary.r_dir = nan_value();
      }
      result.summaries.push_back(summary);
    }
  }
  return result;
}

void write_cells_csv(std::ostream& os, const SweepResult& result) {
  os << "cell_index,a,gamma,sigma_s,sigma_e,n_seeds,n_failed,"
        "floor1,floor2,"
        "ev_theory_one,ev_theory_rec,ev_theory_dir,"
        "ev_emp_one,ev_emp_rec,ev_emp_dir,ev_trace_one,"
        "t_h_theory,delta_ev_theory,pearson_r,bias_distance,"
        "mse_one,mse_rec,mse_dir,"
        "b_mean_1,b_mean_2,"
        "cov_b_11,cov_b_12,cov_b_22,"
        "cov_rec_11,cov_rec_12,cov_rec_22,"
        "cov_dir_11,cov_dir_12,cov_dir_22\n";
  for (const CellReport& c : result.cells) {
    std::vector<std::string> row;
    row.push_back(std::to_string(c.cell_index));
    for (double v : {c.params.a, c.params.gamma, c.params.sigma_s, c.params.sigma_e})
      row.push_back(format_double(v));
    row.push_back(std::to_string(c.n_seeds));
    row.push_back(std::to_string(c.n_failed));
    for (double v :
         {c.floors.sigma2_eps1, c.floors.sigma2_eps2, c.ev_theory_one,
          c.ev_theory_rec, c.ev_theory_dir, c.ev_emp_one, c.ev_emp_rec,
          c.ev_emp_dir, c.ev_trace_one, c.t_h_theory, c.delta_ev_theory,
          c.pearson_r, c.bias_distance, c.mse_one, c.mse_rec, c.mse_dir,
          c.mean_one_step[0], c.mean_one_step[1], c.cov_one_step[0],
          c.cov_one_step[1], c.cov_one_step[2], c.cov_recursive[0],
          c.cov_recursive[1], c.cov_recursive[2], c.cov_direct[0],
          c.cov_direct[1], c.cov_direct[2]})
      row.push_back(format_double(v));
    write_csv_row(os, row);
  }
}

void write_summary_json(std::ostream& os, const SweepResult& result) {
  nlohmann::ordered_json j;
  j["base_seed"] = result.base_seed;
  j["n_cells"] = result.cells.size();
  j["n_failed_cells"] = result.failures.size();
  j["noise_configs"] = nlohmann::ordered_json::array();
  for (const NoiseConfigSummary& s : result.summaries) {
    nlohmann::ordered_json e;
    e["sigma_s"] = s.sigma_s;
    e["sigma_e"] = s.sigma_e;
    e["n_cells"] = s.n_cells;
    e["n_failed_cells"] = s.n_failed_cells;
    e["pearson_theory_vs_empirical_rec"] = s.r_rec;
    e["pearson_theory_vs_empirical_dir"] = s.r_dir;
    e["mean_bias_distance"] = s.mean_bias_distance;
    e["prop_recursive_wins_analytic"] = s.prop_rec_wins_analytic;
    e["prop_recursive_wins_empirical"] = s.prop_rec_wins_empirical;
    e["winner_agreement"] = s.winner_agreement;
    j["noise_configs"].push_back(std::move(e));
  }
  if (!result.failures.empty()) {
    j["failures"] = nlohmann::ordered_json::array();
    for (const FailedCell& f : result.failures) {
      nlohmann::ordered_json e;
      e["cell_index"] = f.cell_index;
      e["a"] = f.params.a;
      e["gamma"] = f.params.gamma;
      e["sigma_s"] = f.params.sigma_s;
      e["sigma_e"] = f.params.sigma_e;
      e["message"] = f.message;
      j["failures"].push_back(std::move(e));
    }
  }
  os << j.dump(2) << '\n';
}

}  // namespace msf::mcharness
