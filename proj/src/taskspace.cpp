#include "msf/taskspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "msf/csvio.hpp"
#include "msf/estimate.hpp"
#include "msf/optim.hpp"
#include "msf/parallel.hpp"
#include "msf/rng.hpp"

namespace msf::taskspace {

namespace {

using polypred::Monomial;

/// psi basis monomials over the two lag variables, in task order.
const std::array<Monomial, 6>& psi_monomials() {
  static const std::array<Monomial, 6> psi = {
      Monomial::variable(0),          // y_t
      Monomial::variable(1),          // y_{t-1}
      Monomial({{0, 1}, {1, 1}}),     // y_t * y_{t-1}
      Monomial::variable(0, 2),       // y_t^2
      Monomial({{0, 2}, {1, 1}}),     // y_t^2 * y_{t-1}
      Monomial::variable(1, 2),       // y_{t-1}^2
  };
  return psi;
}

Eigen::VectorXd psi5_features(double y_t, double y_tm1) {
  const auto psi = dgp::task_basis(y_t, y_tm1);
  Eigen::VectorXd out(5);
  // task_basis order matches psi order; the recursive image never reaches
  // the 6th coordinate.
  for (int k = 0; k < 5; ++k) out[k] = psi[static_cast<std::size_t>(k)];
  return out;
}

}  // namespace

BilinearTwoStepMap::BilinearTwoStepMap()
    : comp_(polypred::compose(polypred::PolyPredictor::bilinear2(1.0, 1.0, 1.0), 2)) {
  const auto& psi = psi_monomials();
  for (int k = 0; k < 5; ++k) {
    const int idx = comp_.support_index(psi[static_cast<std::size_t>(k)]);
    if (idx < 0)
      throw std::logic_error(
          "bilinear two-step composition is missing an expected psi monomial");
    psi_to_support_[static_cast<std::size_t>(k)] = idx;
  }
  if (comp_.n_alpha() != 5)
    throw std::logic_error("bilinear two-step composition should have 5 terms");
}

Eigen::VectorXd BilinearTwoStepMap::g(const Eigen::Vector3d& b) const {
  const Eigen::VectorXd alpha = comp_.alpha_at(b);
  Eigen::VectorXd out(5);
  for (int k = 0; k < 5; ++k)
    out[k] = alpha[psi_to_support_[static_cast<std::size_t>(k)]];
  return out;
}

Eigen::MatrixXd BilinearTwoStepMap::jacobian(const Eigen::Vector3d& b) const {
  const Eigen::MatrixXd jac = comp_.jacobian_at(b);
  Eigen::MatrixXd out(5, 3);
  for (int k = 0; k < 5; ++k)
    out.row(k) = jac.row(psi_to_support_[static_cast<std::size_t>(k)]);
  return out;
}

std::array<dgp::Interval, 6> TaskBox::as_theta_bounds() const {
  return {alpha_bounds[0], alpha_bounds[1], alpha_bounds[2],
          alpha_bounds[3], alpha_bounds[4], theta6_bounds};
}

TaskBox build_task_box(int n_samples, dgp::Interval b_bounds, std::uint64_t seed) {
  if (n_samples < 1)
    throw std::invalid_argument("build_task_box: n_samples must be >= 1");
  if (!(b_bounds.lo < b_bounds.hi))
    throw std::invalid_argument("build_task_box: empty b interval");

  const BilinearTwoStepMap map;
  Rng rng(seed);
  TaskBox box;
  for (int i = 0; i < n_samples; ++i) {
    Eigen::Vector3d b;
    for (int k = 0; k < 3; ++k) b[k] = rng.uniform(b_bounds.lo, b_bounds.hi);
    const Eigen::VectorXd alpha = map.g(b);
    for (int k = 0; k < 5; ++k) {
      auto& iv = box.alpha_bounds[static_cast<std::size_t>(k)];
      if (i == 0) {
        iv.lo = iv.hi = alpha[k];
      } else {
        iv.lo = std::min(iv.lo, alpha[k]);
        iv.hi = std::max(iv.hi, alpha[k]);
      }
    }
  }
  return box;
}

double distance_to_direct(const dgp::TaskTheta& theta) {
  return std::sqrt(theta.theta[3] * theta.theta[3] +
                   theta.theta[4] * theta.theta[4] +
                   theta.theta[5] * theta.theta[5]);
}

RecursiveProjection distance_to_recursive(const dgp::TaskTheta& theta,
                                          int n_starts, std::uint64_t seed) {
  if (n_starts < 1)
    throw std::invalid_argument("distance_to_recursive: n_starts must be >= 1");

  const BilinearTwoStepMap map;
  Eigen::VectorXd target(5);
  for (int k = 0; k < 5; ++k) target[k] = theta.theta[static_cast<std::size_t>(k)];

  auto residual = [&](const Eigen::VectorXd& b, Eigen::VectorXd& r,
                      Eigen::MatrixXd& jac) {
    const Eigen::Vector3d bv = b.head<3>();
    r = map.g(bv) - target;
    jac = map.jacobian(bv);
  };

  Rng rng(seed);
  RecursiveProjection best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_starts; ++s) {
    Eigen::VectorXd b0 = Eigen::VectorXd::Zero(3);
    if (s > 0)
      for (int k = 0; k < 3; ++k) b0[k] = rng.uniform(-1.5, 1.5);
    const LmResult lm = levenberg_marquardt(residual, b0);
    if (lm.converged) ++best.n_converged_starts;
    if (lm.cost < best_cost) {
      best_cost = lm.cost;
      best.argmin_b = lm.x.head<3>();
      best.converged = lm.converged;
    }
  }
  const double sq = 2.0 * best_cost;  // cost is 0.5 * ||r||^2
  best.distance =
      std::sqrt(std::max(0.0, sq) + theta.theta[5] * theta.theta[5]);
  return best;
}

FitBothResult fit_both(const dgp::TaskTheta& theta, const FitBothConfig& cfg,
                       std::uint64_t seed) {
  if (cfg.n_train < 8 || cfg.n_eval < 8)
    throw std::invalid_argument("fit_both: train/eval sizes too small");
  if (cfg.n_starts < 1)
    throw std::invalid_argument("fit_both: n_starts must be >= 1");

  const dgp::TaskData train = dgp::generate_task_data(
      theta, cfg.n_train, cfg.input_std, cfg.noise_std, derive_seed(seed, 0));
  const dgp::TaskData eval = dgp::generate_task_data(
      theta, cfg.n_eval, cfg.input_std, cfg.noise_std, derive_seed(seed, 1));

  FitBothResult out;

  // Direct family: OLS on (y_t, y_{t-1}, y_t*y_{t-1}).
  auto direct_features = [](const Eigen::MatrixXd& inputs) {
    Eigen::MatrixXd f(inputs.rows(), 3);
    f.col(0) = inputs.col(0);
    f.col(1) = inputs.col(1);
    f.col(2) = inputs.col(0).cwiseProduct(inputs.col(1));
    return f;
  };
  const Eigen::VectorXd c_hat =
      estimate::ols_fit(direct_features(train.inputs), train.targets);
  out.c_hat = c_hat.head<3>();
  const Eigen::VectorXd eval_pred_c = direct_features(eval.inputs) * c_hat;
  out.mse_c = (eval_pred_c - eval.targets).squaredNorm() /
              static_cast<double>(eval.targets.size());

  // Recursive family: nonlinear least squares over b with the composed map.
  const BilinearTwoStepMap map;
  Eigen::MatrixXd phi_train(train.inputs.rows(), 5);
  for (Eigen::Index i = 0; i < train.inputs.rows(); ++i)
    phi_train.row(i) =
        psi5_features(train.inputs(i, 0), train.inputs(i, 1)).transpose();
  Eigen::MatrixXd phi_eval(eval.inputs.rows(), 5);
  for (Eigen::Index i = 0; i < eval.inputs.rows(); ++i)
    phi_eval.row(i) =
        psi5_features(eval.inputs(i, 0), eval.inputs(i, 1)).transpose();

  auto residual = [&](const Eigen::VectorXd& b, Eigen::VectorXd& r,
                      Eigen::MatrixXd& jac) {
    const Eigen::Vector3d bv = b.head<3>();
    r = phi_train * map.g(bv) - train.targets;
    jac = phi_train * map.jacobian(bv);
  };

  Rng rng(derive_seed(seed, 2));
  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_b = Eigen::Vector3d::Zero();
  for (int s = 0; s < cfg.n_starts; ++s) {
    Eigen::VectorXd b0 = Eigen::VectorXd::Zero(3);
    if (s > 0)
      for (int k = 0; k < 3; ++k) b0[k] = rng.uniform(-1.5, 1.5);
    const LmResult lm = levenberg_marquardt(residual, b0);
    if (lm.cost < best_cost) {
      best_cost = lm.cost;
      best_b = lm.x.head<3>();
    }
  }
  out.b_hat = best_b;
  const Eigen::VectorXd eval_pred_b = phi_eval * map.g(best_b);
  out.mse_alpha = (eval_pred_b - eval.targets).squaredNorm() /
                  static_cast<double>(eval.targets.size());
  return out;
}

std::vector<EcdfPoint> ecdf(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("ecdf: empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  std::vector<EcdfPoint> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    // Keep only the last (highest) fraction per distinct value.
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.push_back(EcdfPoint{values[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

void TaskspaceConfig::validate() const {
  if (n_tasks < 1)
    throw std::invalid_argument("taskspace config: n_tasks must be >= 1");
  if (n_box_samples < 1)
    throw std::invalid_argument("taskspace config: n_box_samples must be >= 1");
  if (!(b_bounds.lo < b_bounds.hi))
    throw std::invalid_argument("taskspace config: empty b interval");
  if (n_starts < 1)
    throw std::invalid_argument("taskspace config: n_starts must be >= 1");
  if (fit.n_train < 8 || fit.n_eval < 8)
    throw std::invalid_argument("taskspace config: fit sizes too small");
  if (fit.input_std <= 0.0)
    throw std::invalid_argument("taskspace config: input_std must be > 0");
  if (fit.noise_std < 0.0)
    throw std::invalid_argument("taskspace config: noise_std must be >= 0");
}

TaskspaceResult run_taskspace(const TaskspaceConfig& cfg, std::uint64_t base_seed,
                              int jobs) {
  cfg.validate();

  TaskspaceResult result;
  result.cfg = cfg;
  result.base_seed = base_seed;
  result.box = build_task_box(cfg.n_box_samples, cfg.b_bounds,
                              derive_seed(base_seed, 0));

  const auto bounds = result.box.as_theta_bounds();
  result.outcomes.resize(static_cast<std::size_t>(cfg.n_tasks));
  parallel_for(static_cast<std::size_t>(cfg.n_tasks), jobs, [&](std::size_t i) {
    TaskOutcome& outcome = result.outcomes[i];
    outcome.task_index = static_cast<int>(i);
    outcome.theta =
        dgp::sample_task(bounds, derive_seed(base_seed, 1, i));
    outcome.d_c = distance_to_direct(outcome.theta);
    const RecursiveProjection proj = distance_to_recursive(
        outcome.theta, cfg.n_starts, derive_seed(base_seed, 2, i));
    outcome.d_alpha = proj.distance;
    outcome.argmin_b = proj.argmin_b;
    try {
      const FitBothResult fit =
          fit_both(outcome.theta, cfg.fit, derive_seed(base_seed, 3, i));
      outcome.mse_alpha = fit.mse_alpha;
      outcome.mse_c = fit.mse_c;
    } catch (const estimate::SingularFitError&) {
      outcome.skipped = true;
    }
  });
  for (const TaskOutcome& o : result.outcomes)
    if (o.skipped) ++result.n_skipped;
  return result;
}

void write_tasks_csv(std::ostream& os, const TaskspaceResult& result) {
  os << "task_index,theta1,theta2,theta3,theta4,theta5,theta6,"
        "d_alpha,d_c,mse_alpha,mse_c,b1,b2,b3,skipped\n";
  for (const TaskOutcome& o : result.outcomes) {
    std::vector<std::string> row;
    row.push_back(std::to_string(o.task_index));
    for (double v : o.theta.theta) row.push_back(format_double(v));
    for (double v : {o.d_alpha, o.d_c, o.mse_alpha, o.mse_c, o.argmin_b[0],
                     o.argmin_b[1], o.argmin_b[2]})
      row.push_back(format_double(v));
    row.push_back(o.skipped ? "1" : "0");
    write_csv_row(os, row);
  }
}

void write_ecdf_csv(std::ostream& os, const std::vector<EcdfPoint>& points) {
  os << "value,fraction\n";
  for (const EcdfPoint& p : points)
    os << format_double(p.value) << ',' << format_double(p.fraction) << '\n';
}

}  // namespace msf::taskspace
