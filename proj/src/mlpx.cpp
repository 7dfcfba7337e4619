#include "msf/mlpx.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "msf/csvio.hpp"
#include "msf/mlpx_errors.hpp"
#include "msf/parallel.hpp"
#include "msf/rng.hpp"

namespace msf::mlpx {

namespace {

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation act) {
  if (act == Activation::identity) return z;
  return z.array().tanh().matrix();
}

/// act'(z) expressed through the activation value a = act(z).
Eigen::MatrixXd activation_slope(const Eigen::MatrixXd& a, Activation act) {
  if (act == Activation::identity)
    return Eigen::MatrixXd::Ones(a.rows(), a.cols());
  return (1.0 - a.array().square()).matrix();
}

struct LayerCache {
  Eigen::MatrixXd a1;  ///< n x width
  Eigen::MatrixXd y;   ///< n x out
};

LayerCache forward_batch(const MlpParams& p, const Eigen::MatrixXd& x) {
  LayerCache c;
  Eigen::MatrixXd z1 = x * p.w1.transpose();
  z1.rowwise() += p.b1.transpose();
  c.a1 = activate(z1, p.act);
  c.y = c.a1 * p.w2.transpose();
  c.y.rowwise() += p.b2.transpose();
  return c;
}

/// Accumulates gradients for one application of the net given upstream
/// dL/dY, and returns dL/dX for chaining.
Eigen::MatrixXd backward_batch(const MlpParams& p, const Eigen::MatrixXd& x,
                               const LayerCache& c, const Eigen::MatrixXd& dy,
                               Gradients& g) {
  g.w2 += dy.transpose() * c.a1;
  g.b2 += dy.colwise().sum().transpose();
  const Eigen::MatrixXd da1 = dy * p.w2;
  const Eigen::MatrixXd dz1 =
      da1.cwiseProduct(activation_slope(c.a1, p.act));
  g.w1 += dz1.transpose() * x;
  g.b1 += dz1.colwise().sum().transpose();
  return dz1 * p.w1;
}

Gradients zero_like(const MlpParams& p) {
  Gradients g;
  g.w1 = Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols());
  g.b1 = Eigen::VectorXd::Zero(p.b1.size());
  g.w2 = Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols());
  g.b2 = Eigen::VectorXd::Zero(p.b2.size());
  return g;
}

/// Shifted window batch: prepend the predictions, drop the oldest lag.
Eigen::MatrixXd feed_back(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y1) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  out.col(0) = y1.col(0);
  if (x.cols() > 1) out.rightCols(x.cols() - 1) = x.leftCols(x.cols() - 1);
  return out;
}

struct AdamState {
  Gradients m;
  Gradients v;
  long t = 0;
};

void adam_step(MlpParams& p, const Gradients& g, AdamState& st, double lr) {
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  st.t += 1;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(st.t));
  auto update = [&](auto& theta, const auto& grad, auto& m, auto& v) {
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    theta -= (lr * (m / c1).array() / ((v / c2).array().sqrt() + eps))
                 .matrix();
  };
  update(p.w1, g.w1, st.m.w1, st.v.w1);
  update(p.b1, g.b1, st.m.b1, st.v.b1);
  update(p.w2, g.w2, st.m.w2, st.v.w2);
  update(p.b2, g.b2, st.m.b2, st.v.b2);
}

}  // namespace

MlpParams init_params(int p, int width, int n_outputs, std::uint64_t seed,
                      Activation act) {
  if (p < 1 || width < 1 || n_outputs < 1)
    throw std::invalid_argument("init_params: dimensions must be >= 1");
  MlpParams out;
  out.act = act;
  out.w1.resize(width, p);
  out.b1.resize(width);
  out.w2.resize(n_outputs, width);
  out.b2.resize(n_outputs);
  Rng rng(seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(p));
  for (int i = 0; i < width; ++i)
    for (int j = 0; j < p; ++j) out.w1(i, j) = rng.uniform(-s1, s1);
  for (int i = 0; i < width; ++i) out.b1[i] = rng.uniform(-s1, s1);
  const double s2 = 1.0 / std::sqrt(static_cast<double>(width));
  for (int i = 0; i < n_outputs; ++i)
    for (int j = 0; j < width; ++j) out.w2(i, j) = rng.uniform(-s2, s2);
  for (int i = 0; i < n_outputs; ++i) out.b2[i] = rng.uniform(-s2, s2);
  return out;
}

Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& x) {
  if (x.size() != params.n_inputs())
    throw std::invalid_argument("forward: input size mismatch");
  const LayerCache c = forward_batch(params, x.transpose());
  return c.y.row(0).transpose();
}

Eigen::Vector2d recursive_two_step(const MlpParams& params,
                                   const Eigen::VectorXd& x) {
  if (params.n_outputs() != 1)
    throw std::invalid_argument(
        "recursive_two_step: recursive nets have a single output");
  if (x.size() != params.n_inputs())
    throw std::invalid_argument("recursive_two_step: input size mismatch");
  const LayerCache c1 = forward_batch(params, x.transpose());
  const Eigen::MatrixXd x2 = feed_back(x.transpose(), c1.y);
  const LayerCache c2 = forward_batch(params, x2);
  return Eigen::Vector2d(c1.y(0, 0), c2.y(0, 0));
}

double loss_and_grad(const MlpParams& params, const Eigen::MatrixXd& x,
                     const Eigen::MatrixXd& targets, Strategy strategy,
                     LossMode mode, Gradients* grad) {
  if (x.rows() != targets.rows())
    throw std::invalid_argument("loss_and_grad: row count mismatch");
  if (targets.cols() != 2)
    throw std::invalid_argument("loss_and_grad: expected two target columns");
  if (x.cols() != params.n_inputs())
    throw std::invalid_argument("loss_and_grad: input width mismatch");
  const double n = static_cast<double>(x.rows());
  if (x.rows() == 0) throw std::invalid_argument("loss_and_grad: empty batch");

  Gradients local = zero_like(params);
  double loss = 0.0;

  if (strategy == Strategy::direct) {
    if (params.n_outputs() != 2)
      throw std::invalid_argument(
          "loss_and_grad: direct strategy needs a two-output net");
    const LayerCache c = forward_batch(params, x);
    const Eigen::MatrixXd err = c.y - targets;
    loss = 0.5 * err.squaredNorm() / n;
    if (grad) {
      const Eigen::MatrixXd dy = err / n;
      backward_batch(params, x, c, dy, local);
    }
  } else {
    if (params.n_outputs() != 1)
      throw std::invalid_argument(
          "loss_and_grad: recursive strategy needs a single-output net");
    const LayerCache c1 = forward_batch(params, x);
    const Eigen::MatrixXd x2 = feed_back(x, c1.y);
    const LayerCache c2 = forward_batch(params, x2);
    const Eigen::VectorXd err2 = c2.y.col(0) - targets.col(1);
    if (mode == LossMode::step_two_only) {
      loss = err2.squaredNorm() / n;
    } else {
      const Eigen::VectorXd err1 = c1.y.col(0) - targets.col(0);
      loss = 0.5 * (err1.squaredNorm() + err2.squaredNorm()) / n;
    }
    if (grad) {
      const double scale = mode == LossMode::step_two_only ? 2.0 / n : 1.0 / n;
      const Eigen::MatrixXd dy2 = err2 * scale;
      const Eigen::MatrixXd dx2 = backward_batch(params, x2, c2, dy2, local);
      // The fed-back prediction is column 0 of the step-2 input.
      Eigen::MatrixXd dy1 = dx2.col(0);
      if (mode == LossMode::average_both_steps)
        dy1 += (c1.y.col(0) - targets.col(0)) / n;
      backward_batch(params, x, c1, dy1, local);
    }
  }

  if (grad) *grad = std::move(local);
  return loss;
}

void TrainConfig::validate() const {
  if (p < 1) throw std::invalid_argument("train config: p must be >= 1");
  if (horizon != 2)
    throw std::invalid_argument("train config: the study is defined for horizon = 2");
  if (width < 1) throw std::invalid_argument("train config: width must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("train config: lr must be > 0");
  if (epochs < 1) throw std::invalid_argument("train config: epochs must be >= 1");
  if (batch < 1) throw std::invalid_argument("train config: batch must be >= 1");
  if (n_train < 1)
    throw std::invalid_argument("train config: n_train must be >= 1");
}

WindowedData build_windows(std::span<const double> series, int p) {
  if (p < 1) throw std::invalid_argument("build_windows: p must be >= 1");
  const long len = static_cast<long>(series.size());
  const long n = len - p - 1;
  if (n < 1)
    throw DataError("series of length " + std::to_string(len) +
                    " is too short for p = " + std::to_string(p) +
                    " with two-step targets (need at least " +
                    std::to_string(p + 2) + " samples)");
  WindowedData out;
  out.x.resize(n, p);
  out.targets.resize(n, 2);
  for (long i = 0; i < n; ++i) {
    for (int lag = 0; lag < p; ++lag)
      out.x(i, lag) = series[static_cast<std::size_t>(p - 1 + i - lag)];
    out.targets(i, 0) = series[static_cast<std::size_t>(p - 1 + i + 1)];
    out.targets(i, 1) = series[static_cast<std::size_t>(p - 1 + i + 2)];
  }
  return out;
}

RunRecord train(const WindowedData& train_pool, const WindowedData& test_data,
                const TrainConfig& cfg, Strategy strategy) {
  cfg.validate();
  if (train_pool.x.cols() != cfg.p || test_data.x.cols() != cfg.p)
    throw std::invalid_argument("train: window width does not match cfg.p");
  if (train_pool.x.rows() < cfg.n_train)
    throw DataError("train: pool has " + std::to_string(train_pool.x.rows()) +
                    " rows, fewer than n_train = " + std::to_string(cfg.n_train));
  if (test_data.x.rows() < 1) throw DataError("train: empty test set");

  RunRecord record;
  record.strategy = strategy;
  record.n_train = cfg.n_train;
  record.seed = cfg.seed;

  // Most recent n_train windows of the pool.
  const Eigen::MatrixXd x_tr =
      train_pool.x.bottomRows(cfg.n_train);
  const Eigen::MatrixXd t_tr = train_pool.targets.bottomRows(cfg.n_train);

  const int n_outputs = strategy == Strategy::direct ? 2 : 1;
  Rng rng(cfg.seed);
  MlpParams params =
      init_params(cfg.p, cfg.width, n_outputs, rng.next_u64());

  AdamState adam;
  adam.m = zero_like(params);
  adam.v = zero_like(params);

  const bool full_batch = cfg.n_train < cfg.full_batch_threshold;
  std::vector<int> order(static_cast<std::size_t>(cfg.n_train));
  std::iota(order.begin(), order.end(), 0);

  Gradients grad;
  record.curve.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (full_batch) {
      const double loss =
          loss_and_grad(params, x_tr, t_tr, strategy, cfg.loss_mode, &grad);
      if (!std::isfinite(loss)) {
        record.failed = true;
        break;
      }
      adam_step(params, grad, adam, cfg.lr);
    } else {
      std::shuffle(order.begin(), order.end(), rng.engine());
      for (int start = 0; start < cfg.n_train; start += cfg.batch) {
        const int size = std::min(cfg.batch, cfg.n_train - start);
        Eigen::MatrixXd xb(size, cfg.p);
        Eigen::MatrixXd tb(size, 2);
        for (int k = 0; k < size; ++k) {
          xb.row(k) = x_tr.row(order[static_cast<std::size_t>(start + k)]);
          tb.row(k) = t_tr.row(order[static_cast<std::size_t>(start + k)]);
        }
        const double loss =
            loss_and_grad(params, xb, tb, strategy, cfg.loss_mode, &grad);
        if (!std::isfinite(loss)) {
          record.failed = true;
          break;
        }
        adam_step(params, grad, adam, cfg.lr);
      }
      if (record.failed) break;
    }
    const double epoch_objective =
        loss_and_grad(params, x_tr, t_tr, strategy, cfg.loss_mode, nullptr);
    if (!std::isfinite(epoch_objective)) {
      record.failed = true;
      break;
    }
    record.curve.push_back(epoch_objective);
  }

  if (!record.failed) {
    auto two_step_mse = [&](const Eigen::MatrixXd& x,
                            const Eigen::MatrixXd& t) {
      Eigen::VectorXd pred2(x.rows());
      if (strategy == Strategy::direct) {
        const LayerCache c = forward_batch(params, x);
        pred2 = c.y.col(1);
      } else {
        const LayerCache c1 = forward_batch(params, x);
        const Eigen::MatrixXd x2 = feed_back(x, c1.y);
        const LayerCache c2 = forward_batch(params, x2);
        pred2 = c2.y.col(0);
      }
      return (pred2 - t.col(1)).squaredNorm() / static_cast<double>(x.rows());
    };
    record.train_mse = two_step_mse(x_tr, t_tr);
    record.test_mse = two_step_mse(test_data.x, test_data.targets);
    if (!std::isfinite(record.train_mse) || !std::isfinite(record.test_mse))
      record.failed = true;
  }
  return record;
}

std::vector<double> load_series(const std::string& path,
                                const std::string& column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path);

  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
  };
  auto trim = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && s[b] == ' ') ++b;
    return s.substr(b);
  };

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty data file: " + path);
  const std::vector<std::string> header = split(line);
  long col = -1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == column) col = static_cast<long>(i);
  if (col < 0) {
    std::string names;
    for (std::size_t i = 0; i < header.size(); ++i)
      names += (i ? ", " : "") + trim(header[i]);
    throw DataError("column \"" + column + "\" not found; file has: " + names);
  }

  std::vector<double> out;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (static_cast<long>(cells.size()) <= col)
      throw DataError("line " + std::to_string(line_no) + ": only " +
                      std::to_string(cells.size()) + " cells, need column " +
                      std::to_string(col + 1));
    const std::string cell = trim(cells[static_cast<std::size_t>(col)]);
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
      throw DataError("line " + std::to_string(line_no) +
                      ": cannot parse \"" + cell + "\" as a number");
    out.push_back(value);
  }
  return out;
}

SplitSeries split_standardize(std::span<const double> series, double train_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw std::invalid_argument("split_standardize: train_frac must be in (0, 1)");
  const std::size_t n = series.size();
  const std::size_t split = static_cast<std::size_t>(
      std::floor(train_frac * static_cast<double>(n)));
  if (split < 1 || split >= n)
    throw DataError("split_standardize: series of length " + std::to_string(n) +
                    " yields a degenerate " + std::to_string(split) + "/" +
                    std::to_string(n - split) + " split");

  double mean = 0.0;
  for (std::size_t i = 0; i < split; ++i) mean += series[i];
  mean /= static_cast<double>(split);
  double var = 0.0;
  for (std::size_t i = 0; i < split; ++i) {
    const double d = series[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(split);
  if (var <= 0.0)
    throw DataError("split_standardize: train segment is constant");

  SplitSeries out;
  out.scaler = Scaler{mean, std::sqrt(var)};
  out.train.reserve(split);
  out.test.reserve(n - split);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (series[i] - mean) / out.scaler.std;
    if (i < split)
      out.train.push_back(z);
    else
      out.test.push_back(z);
  }
  return out;
}

std::vector<RatioRow> ratio_report(const std::vector<RunRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("ratio_report: no records");

  std::map<int, std::pair<std::vector<const RunRecord*>,
                          std::vector<const RunRecord*>>> by_n;
  for (const RunRecord& r : records) {
    auto& bucket = by_n[r.n_train];
    if (r.failed) continue;
    if (r.strategy == Strategy::recursive)
      bucket.first.push_back(&r);
    else
      bucket.second.push_back(&r);
  }

  auto mean_of = [](const std::vector<const RunRecord*>& rs,
                    auto&& get) {
    double s = 0.0;
    for (const RunRecord* r : rs) s += get(*r);
    return s / static_cast<double>(rs.size());
  };
  auto var_of = [&](const std::vector<const RunRecord*>& rs, auto&& get) {
    if (rs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean_of(rs, get);
    double s = 0.0;
    for (const RunRecord* r : rs) {
      const double d = get(*r) - m;
      s += d * d;
    }
    return s / static_cast<double>(rs.size() - 1);
  };

  std::vector<RatioRow> out;
  for (const auto& [n_train, bucket] : by_n) {
    const auto& rec = bucket.first;
    const auto& dir = bucket.second;
    if (rec.empty() || dir.empty())
      throw std::runtime_error(
          "ratio_report: n_train = " + std::to_string(n_train) +
          " lacks successful runs for one strategy");
    RatioRow row;
    row.n_train = n_train;
    row.n_rec = static_cast<int>(rec.size());
    row.n_dir = static_cast<int>(dir.size());
    auto train_mse = [](const RunRecord& r) { return r.train_mse; };
    auto test_mse = [](const RunRecord& r) { return r.test_mse; };
    row.rho_mse_train = mean_of(rec, train_mse) / mean_of(dir, train_mse);
    row.rho_mse_test = mean_of(rec, test_mse) / mean_of(dir, test_mse);
    row.rho_var = var_of(rec, test_mse) / var_of(dir, test_mse);
    out.push_back(row);
  }
  return out;
}

void StudyConfig::validate() const {
  if (p < 1) throw std::invalid_argument("study config: p must be >= 1");
  if (horizon != 2)
    throw std::invalid_argument("study config: the study is defined for horizon = 2");
  if (width < 1) throw std::invalid_argument("study config: width must be >= 1");
  if (!(lr > 0.0)) throw std::invalid_argument("study config: lr must be > 0");
  if (epochs < 1) throw std::invalid_argument("study config: epochs must be >= 1");
  if (batch < 1) throw std::invalid_argument("study config: batch must be >= 1");
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw std::invalid_argument("study config: train_frac must be in (0, 1)");
  if (n_train_grid.empty())
    throw std::invalid_argument("study config: n_train_grid must be non-empty");
  for (int n : n_train_grid)
    if (n < 1)
      throw std::invalid_argument("study config: n_train entries must be >= 1");
  if (n_seeds < 1)
    throw std::invalid_argument("study config: n_seeds must be >= 1");
  if (max_fail_frac < 0.0 || max_fail_frac > 1.0)
    throw std::invalid_argument("study config: max_fail_frac outside [0, 1]");
}

StudyResult run_study(std::span<const double> series, const StudyConfig& cfg,
                      std::uint64_t base_seed, int jobs) {
  cfg.validate();

  // Both segments must supply at least one window of p lags plus the
  // two-step target; checking up front gives a clearer message than the
  // split/standardize internals would.
  const std::size_t min_rows =
      2 * (static_cast<std::size_t>(cfg.p) + cfg.horizon + 1);
  if (series.size() < min_rows) {
    throw DataError("series too short: " + std::to_string(series.size()) +
                    " rows, need at least " + std::to_string(min_rows) +
                    " for p = " + std::to_string(cfg.p) + " and horizon " +
                    std::to_string(cfg.horizon));
  }

  const SplitSeries split = split_standardize(series, cfg.train_frac);
  const WindowedData train_pool = build_windows(split.train, cfg.p);
  const WindowedData test_data = build_windows(split.test, cfg.p);

  const int max_n = *std::max_element(cfg.n_train_grid.begin(),
                                      cfg.n_train_grid.end());
  if (train_pool.x.rows() < max_n)
    throw DataError("train pool has " + std::to_string(train_pool.x.rows()) +
                    " windows, fewer than the largest n_train = " +
                    std::to_string(max_n));

  StudyResult result;
  result.cfg = cfg;
  result.base_seed = base_seed;

  const std::size_t total = cfg.n_train_grid.size() *
                            static_cast<std::size_t>(cfg.n_seeds) * 2;
  result.records.resize(total);
  parallel_for(total, jobs, [&](std::size_t idx) {
    const std::size_t strat_idx = idx % 2;
    const std::size_t seed_idx = (idx / 2) % static_cast<std::size_t>(cfg.n_seeds);
    const std::size_t grid_idx = idx / 2 / static_cast<std::size_t>(cfg.n_seeds);
    const Strategy strategy =
        strat_idx == 0 ? Strategy::recursive : Strategy::direct;

    TrainConfig tc;
    tc.p = cfg.p;
    tc.horizon = cfg.horizon;
    tc.width = cfg.width;
    tc.lr = cfg.lr;
    tc.epochs = cfg.epochs;
    tc.batch = cfg.batch;
    tc.full_batch_threshold = cfg.full_batch_threshold;
    tc.n_train = cfg.n_train_grid[grid_idx];
    tc.loss_mode = cfg.loss_mode;
    tc.seed = derive_seed(derive_seed(base_seed, grid_idx, seed_idx), strat_idx);
    result.records[idx] = train(train_pool, test_data, tc, strategy);
  });

  for (const RunRecord& r : result.records)
    if (r.failed) ++result.n_failed;
  if (static_cast<double>(result.n_failed) >
      cfg.max_fail_frac * static_cast<double>(total))
    throw std::runtime_error("run_study: " + std::to_string(result.n_failed) +
                             " of " + std::to_string(total) +
                             " training runs failed");

  result.ratios = ratio_report(result.records);
  return result;
}

void write_runs_csv(std::ostream& os, const StudyResult& result) {
  os << "strategy,n_train,seed,failed,epochs,train_mse,test_mse\n";
  for (const RunRecord& r : result.records) {
    std::vector<std::string> row;
    row.push_back(r.strategy == Strategy::recursive ? "recursive" : "direct");
    row.push_back(std::to_string(r.n_train));
    row.push_back(std::to_string(r.seed));
    row.push_back(r.failed ? "1" : "0");
    row.push_back(std::to_string(r.curve.size()));
    row.push_back(format_double(r.train_mse));
    row.push_back(format_double(r.test_mse));
    write_csv_row(os, row);
  }
}

void write_ratios_csv(std::ostream& os, const std::vector<RatioRow>& ratios) {
  os << "n_train,rho_mse_train,rho_mse_test,rho_var,n_rec,n_dir\n";
  for (const RatioRow& r : ratios) {
    std::vector<std::string> row;
    row.push_back(std::to_string(r.n_train));
    row.push_back(format_double(r.rho_mse_train));
    row.push_back(format_double(r.rho_mse_test));
    row.push_back(format_double(r.rho_var));
    row.push_back(std::to_string(r.n_rec));
    row.push_back(std::to_string(r.n_dir));
    write_csv_row(os, row);
  }
}

void write_curve_csv(std::ostream& os, const RunRecord& record) {
  os << "epoch,objective\n";
  for (std::size_t e = 0; e < record.curve.size(); ++e)
    os << e << ',' << format_double(record.curve[e]) << '\n';
}

std::string curve_file_key(const RunRecord& record) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_n%d_s%020llu",
                record.strategy == Strategy::recursive ? "recursive" : "direct",
                record.n_train,
                static_cast<unsigned long long>(record.seed));
  return std::string(buf);
}

}  // namespace msf::mlpx
