#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "msf/dgp.hpp"
#include "msf/polypred.hpp"

namespace msf::taskspace {

/// The bilinear two-step family as a map g: R^3 -> R^5, derived from the
/// symbolic composition of b1*y[t] + b2*y[t-1] + b3*y[t]*y[t-1] with itself
/// and re-indexed into the psi basis order
/// [y_t, y_{t-1}, y_t*y_{t-1}, y_t^2, y_t^2*y_{t-1}].
class BilinearTwoStepMap {
 public:
  BilinearTwoStepMap();

  Eigen::VectorXd g(const Eigen::Vector3d& b) const;         ///< 5-vector
  Eigen::MatrixXd jacobian(const Eigen::Vector3d& b) const;  ///< 5 x 3

  const polypred::CompositionResult& composition() const { return comp_; }

 private:
  polypred::CompositionResult comp_;
  std::array<int, 5> psi_to_support_{};
};

struct TaskBox {
  /// Coordinatewise bounds of the image cloud g(Unif(b_bounds)^3), psi order.
  std::array<dgp::Interval, 5> alpha_bounds{};
  dgp::Interval theta6_bounds{-1.5, 1.5};

  std::array<dgp::Interval, 6> as_theta_bounds() const;
};

/// Monte Carlo bounding box of the recursive family's parameter cloud. The
/// sampler is a single seeded stream, so boxes are nested as n_samples grows
/// with the same seed.
TaskBox build_task_box(int n_samples, dgp::Interval b_bounds, std::uint64_t seed);

/// Distance from the direct family's span: the direct family covers the
/// first three psi coordinates exactly, so the distance is the norm of the
/// residual block sqrt(theta4^2 + theta5^2 + theta6^2).
double distance_to_direct(const dgp::TaskTheta& theta);

struct RecursiveProjection {
  double distance = 0.0;
  Eigen::Vector3d argmin_b = Eigen::Vector3d::Zero();
  bool converged = false;
  int n_converged_starts = 0;
};

/// Distance from the recursive family's manifold:
/// sqrt(min_b || P5 theta - g(b) ||^2 + theta6^2), minimized by multi-start
/// Levenberg-Marquardt (origin plus n_starts - 1 uniform starts in
/// [-1.5, 1.5]^3).
RecursiveProjection distance_to_recursive(const dgp::TaskTheta& theta,
                                          int n_starts, std::uint64_t seed);

struct FitBothConfig {
  int n_train = 512;
  int n_eval = 2048;
  double input_std = 1.0;
  double noise_std = 0.05;
  int n_starts = 16;
};

struct FitBothResult {
  double mse_alpha = 0.0;  ///< recursive bilinear family, held-out MSE
  double mse_c = 0.0;      ///< direct family, held-out MSE
  Eigen::Vector3d b_hat = Eigen::Vector3d::Zero();
  Eigen::Vector3d c_hat = Eigen::Vector3d::Zero();
};

/// Fits both families on data generated from the task and scores them on a
/// held-out set: the direct family by OLS on (y_t, y_{t-1}, y_t*y_{t-1}), the
/// recursive family by multi-start nonlinear least squares over b.
FitBothResult fit_both(const dgp::TaskTheta& theta, const FitBothConfig& cfg,
                       std::uint64_t seed);

struct EcdfPoint {
  double value = 0.0;
  double fraction = 0.0;
};

/// Right-continuous empirical CDF over distinct values.
std::vector<EcdfPoint> ecdf(std::vector<double> values);

struct TaskOutcome {
  int task_index = 0;
  dgp::TaskTheta theta;
  double d_alpha = 0.0;
  double d_c = 0.0;
  double mse_alpha = 0.0;
  double mse_c = 0.0;
  Eigen::Vector3d argmin_b = Eigen::Vector3d::Zero();
  bool skipped = false;
};

struct TaskspaceConfig {
  int n_box_samples = 20000;
  dgp::Interval b_bounds{-1.5, 1.5};
  int n_tasks = 500;
  int n_starts = 16;
  FitBothConfig fit;

  void validate() const;
};

struct TaskspaceResult {
  TaskspaceConfig cfg;
  std::uint64_t base_seed = 0;
  TaskBox box;
  std::vector<TaskOutcome> outcomes;
  int n_skipped = 0;
};

/// Samples tasks from the box and computes distances and paired fits for
/// each. Per-task seeds derive from (base_seed, task index): byte-identical
/// results for any worker count.
TaskspaceResult run_taskspace(const TaskspaceConfig& cfg, std::uint64_t base_seed,
                              int jobs = 1);

void write_tasks_csv(std::ostream& os, const TaskspaceResult& result);
void write_ecdf_csv(std::ostream& os, const std::vector<EcdfPoint>& points);

}  // namespace msf::taskspace
