#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace msf {

struct LmOptions {
  int max_iter = 200;
  double grad_tol = 1e-6;   ///< stop when ||J^T r||_2 falls below this
  double step_tol = 1e-10;  ///< stop when the accepted step is below this
  double lambda_init = 1e-3;
  double lambda_max = 1e12;
};

struct LmResult {
  Eigen::VectorXd x;
  double cost = 0.0;  ///< 0.5 * ||r||^2 at x
  bool converged = false;
  int iters = 0;
};

/// Dense Levenberg--Marquardt for small nonlinear least-squares problems.
///
/// `fn(x, r, J)` must fill the residual vector r and its Jacobian J at x.
/// Declared convergence means the gradient or accepted-step criterion fired;
/// hitting max_iter leaves converged = false but still returns the best point.
template <typename ResidualFn>
LmResult levenberg_marquardt(ResidualFn&& fn, Eigen::VectorXd x0,
                             const LmOptions& opt = {}) {
  const auto dim = x0.size();
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  fn(x, r, j);
  double cost = 0.5 * r.squaredNorm();
  double lambda = opt.lambda_init;

  LmResult result;
  result.x = x;
  result.cost = cost;

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    result.iters = iter + 1;
    const Eigen::VectorXd grad = j.transpose() * r;
    if (grad.norm() < opt.grad_tol) {
      result.converged = true;
      break;
    }
    const Eigen::MatrixXd jtj = j.transpose() * j;

    bool accepted = false;
    while (lambda <= opt.lambda_max) {
      Eigen::MatrixXd a = jtj;
      a.diagonal().array() += lambda;
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd x_new = x + step;
      Eigen::VectorXd r_new;
      Eigen::MatrixXd j_new;
      fn(x_new, r_new, j_new);
      const double cost_new = 0.5 * r_new.squaredNorm();
      if (std::isfinite(cost_new) && cost_new < cost) {
        x = x_new;
        r = std::move(r_new);
        j = std::move(j_new);
        cost = cost_new;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        result.x = x;
        result.cost = cost;
        if (step.norm() < opt.step_tol) {
          result.converged = true;
          iter = opt.max_iter;  // outer break below
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No downhill step found at any damping: stationary to working precision.
      result.converged = true;
      break;
    }
    if (result.converged) break;
  }

  result.x = x;
  result.cost = cost;
  (void)dim;
  return result;
}

}  // namespace msf
