#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "msf/mlpx_errors.hpp"

namespace msf::mlpx {

enum class Activation { tanh_act, identity };

/// One-hidden-layer perceptron y = w2 * act(w1 * x + b1) + b2.
/// The identity activation exists for collapse-to-linear checks only.
struct MlpParams {
  Eigen::MatrixXd w1;  ///< width x p
  Eigen::VectorXd b1;  ///< width
  Eigen::MatrixXd w2;  ///< out x width
  Eigen::VectorXd b2;  ///< out
  Activation act = Activation::tanh_act;

  int n_inputs() const { return static_cast<int>(w1.cols()); }
  int width() const { return static_cast<int>(w1.rows()); }
  int n_outputs() const { return static_cast<int>(w2.rows()); }
};

struct Gradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

enum class Strategy { recursive, direct };

/// Recursive two-step training loss: step-2 error only (default) or the
/// average of both step errors.
enum class LossMode { step_two_only, average_both_steps };

/// Symmetric fan-in-scaled uniform initialization, seeded.
MlpParams init_params(int p, int width, int n_outputs, std::uint64_t seed,
                      Activation act = Activation::tanh_act);

/// Single-sample forward pass.
Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& x);

/// Two-step recursive forecast: feeds the one-step prediction back as the
/// newest lag and drops the oldest. Returns (yhat1, yhat2).
Eigen::Vector2d recursive_two_step(const MlpParams& params,
                                   const Eigen::VectorXd& x);

/// Mean loss over the batch and its gradient.
///
/// recursive: params must have one output; targets are (y_{t+1}, y_{t+2})
///   columns and the loss follows `mode`. Backprop runs through the unrolled
///   two-step graph including the fed-back prediction path.
/// direct: params must have two outputs trained on both targets, loss
///   averaged over the two outputs.
double loss_and_grad(const MlpParams& params, const Eigen::MatrixXd& x,
                     const Eigen::MatrixXd& targets, Strategy strategy,
                     LossMode mode, Gradients* grad);

struct TrainConfig {
  int p = 50;
  int horizon = 2;
  int width = 2;
  double lr = 1e-3;
  int epochs = 200;
  int batch = 128;
  /// Datasets below this size are trained full-batch.
  int full_batch_threshold = 512;
  int n_train = 0;  ///< rows taken from the training pool (most recent)
  std::uint64_t seed = 0;
  LossMode loss_mode = LossMode::step_two_only;

  void validate() const;
};

struct RunRecord {
  Strategy strategy = Strategy::recursive;
  int n_train = 0;
  std::uint64_t seed = 0;
  /// Two-step-ahead MSE on the training rows / held-out rows, so both
  /// strategies are scored on the same quantity.
  double train_mse = 0.0;
  double test_mse = 0.0;
  /// Per-epoch training objective (the strategy's own loss).
  std::vector<double> curve;
  bool failed = false;
};

/// Windowed supervised view of a scalar series: rows of p lags (newest
/// first) with both one- and two-step-ahead targets.
struct WindowedData {
  Eigen::MatrixXd x;        ///< n x p
  Eigen::MatrixXd targets;  ///< n x 2: (y_{t+1}, y_{t+2})
};

WindowedData build_windows(std::span<const double> series, int p);

/// Adam training of one strategy on (a suffix of) the training windows.
/// Deterministic given cfg.seed (initialization and shuffling).
RunRecord train(const WindowedData& train_pool, const WindowedData& test_data,
                const TrainConfig& cfg, Strategy strategy);

/// CSV ingestion: returns the named column. Parse failures report the line
/// number.
std::vector<double> load_series(const std::string& path,
                                const std::string& column);

struct Scaler {
  double mean = 0.0;
  double std = 1.0;
};

struct SplitSeries {
  std::vector<double> train;
  std::vector<double> test;
  Scaler scaler;  ///< fit on the train segment only, applied to both
};

/// Chronological split at floor(frac * n), standardized with train-segment
/// statistics only.
SplitSeries split_standardize(std::span<const double> series, double train_frac);

struct RatioRow {
  int n_train = 0;
  double rho_mse_train = 0.0;  ///< mean train MSE_rec / mean train MSE_dir
  double rho_mse_test = 0.0;   ///< mean test MSE_rec / mean test MSE_dir
  double rho_var = 0.0;        ///< seed-variance ratio of test MSE, rec/dir
  int n_rec = 0;               ///< successful recursive runs
  int n_dir = 0;
};

/// Aggregates run records into per-n_train ratio rows. Requires both
/// strategies present for every n_train; failed runs are excluded from the
/// statistics. Permutation-invariant in the record order.
std::vector<RatioRow> ratio_report(const std::vector<RunRecord>& records);

struct StudyConfig {
  std::string column = "OT";
  int p = 50;
  int horizon = 2;
  int width = 2;
  double lr = 1e-3;
  int epochs = 200;
  int batch = 128;
  int full_batch_threshold = 512;
  double train_frac = 0.6;
  std::vector<int> n_train_grid{256, 1024, 4096, 16384};
  int n_seeds = 50;
  LossMode loss_mode = LossMode::step_two_only;
  double max_fail_frac = 0.10;

  void validate() const;
};

struct StudyResult {
  StudyConfig cfg;
  std::uint64_t base_seed = 0;
  std::vector<RunRecord> records;  ///< grid-major order: n_train, seed, strategy
  std::vector<RatioRow> ratios;
  int n_failed = 0;
};

/// The recursive-vs-direct study on a raw series: split/standardize, then
/// train both strategies for every (n_train, seed) pair. Run seeds derive
/// from (base_seed, n_train index, seed index, strategy): byte-identical for
/// any worker count. Throws std::runtime_error when more than max_fail_frac
/// of the runs fail.
StudyResult run_study(std::span<const double> series, const StudyConfig& cfg,
                      std::uint64_t base_seed, int jobs = 1);

void write_runs_csv(std::ostream& os, const StudyResult& result);
void write_ratios_csv(std::ostream& os, const std::vector<RatioRow>& ratios);
void write_curve_csv(std::ostream& os, const RunRecord& record);
std::string curve_file_key(const RunRecord& record);

}  // namespace msf::mlpx
