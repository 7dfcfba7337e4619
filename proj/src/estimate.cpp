#include "msf/estimate.hpp"

#include <cmath>
#include <string>

namespace msf::estimate {

namespace {

void validate_moment(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("moment matrix must be square");
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw std::invalid_argument("moment matrix asymmetric beyond 1e-12");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const double min_eig = es.eigenvalues().minCoeff();
  const double tol = 1e-10 * std::max(1.0, m.trace());
  if (min_eig < -tol)
    throw std::invalid_argument(
        "moment matrix not positive semidefinite (min eigenvalue " +
        std::to_string(min_eig) + ")");
}

}  // namespace

DesignMatrix build_design(std::span<const double> series, int p, int h) {
  if (p < 1) throw std::invalid_argument("build_design: p must be >= 1");
  if (h < 1) throw std::invalid_argument("build_design: h must be >= 1");
  const auto len = static_cast<long>(series.size());
  const long n = len - p - h + 1;
  if (n < 1)
    throw std::invalid_argument(
        "build_design: series of length " + std::to_string(len) +
        " is too short for p = " + std::to_string(p) +
        ", h = " + std::to_string(h) + " (need length > p + h - 1)");

  DesignMatrix out;
  out.p = p;
  out.h = h;
  out.rows.resize(n, p);
  out.targets.resize(n);
  for (long i = 0; i < n; ++i) {
    for (int lag = 0; lag < p; ++lag)
      out.rows(i, lag) = series[static_cast<std::size_t>(p - 1 + i - lag)];
    out.targets[i] = series[static_cast<std::size_t>(p - 1 + i + h)];
  }
  return out;
}

Eigen::MatrixXd lag_window_matrix(std::span<const double> series, int p) {
  if (p < 1) throw std::invalid_argument("lag_window_matrix: p must be >= 1");
  const auto len = static_cast<long>(series.size());
  const long n = len - p + 1;
  if (n < 1)
    throw std::invalid_argument(
        "lag_window_matrix: series shorter than the lag window");
  Eigen::MatrixXd rows(n, p);
  for (long i = 0; i < n; ++i)
    for (int lag = 0; lag < p; ++lag)
      rows(i, lag) = series[static_cast<std::size_t>(p - 1 + i - lag)];
  return rows;
}

Eigen::VectorXd ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size())
    throw std::invalid_argument("ols_fit: row/target count mismatch");
  if (x.rows() < x.cols())
    throw std::invalid_argument("ols_fit: need at least as many rows as columns");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::VectorXd r_diag = qr.matrixR().diagonal().cwiseAbs();
  const double r_max = r_diag.maxCoeff();
  const double r_min = r_diag.minCoeff();
  const double rcond = r_max > 0.0 ? r_min / r_max : 0.0;
  if (rcond < 1e-12)
    throw SingularFitError(
        "ols_fit: singular design (reciprocal condition estimate " +
            std::to_string(rcond) + " < 1e-12)",
        rcond);
  return qr.solve(y);
}

Eigen::VectorXd ols_fit(const DesignMatrix& design) {
  return ols_fit(design.rows, design.targets);
}

MomentMatrix second_moment(const Eigen::MatrixXd& features, MomentKind kind) {
  if (features.rows() < 1)
    throw std::invalid_argument("second_moment: empty feature matrix");
  Eigen::MatrixXd m =
      (features.transpose() * features) / static_cast<double>(features.rows());
  m = ((m + m.transpose()) / 2.0).eval();
  validate_moment(m);
  return MomentMatrix{std::move(m), kind};
}

MomentMatrix composed_second_moment(std::span<const double> series,
                                    const polypred::CompositionResult& comp) {
  const Eigen::MatrixXd windows = lag_window_matrix(series, comp.p);
  const auto k = static_cast<Eigen::Index>(comp.support.size());
  Eigen::MatrixXd features(windows.rows(), k);
  std::vector<double> window(static_cast<std::size_t>(comp.p));
  for (Eigen::Index i = 0; i < windows.rows(); ++i) {
    for (int lag = 0; lag < comp.p; ++lag)
      window[static_cast<std::size_t>(lag)] = windows(i, lag);
    for (Eigen::Index j = 0; j < k; ++j)
      features(i, j) = comp.support[static_cast<std::size_t>(j)].eval(window);
  }
  return second_moment(features, MomentKind::composed);
}

ParamCov ols_param_cov(double sigma2_eps, int n, const MomentMatrix& q) {
  if (sigma2_eps < 0.0)
    throw std::invalid_argument("ols_param_cov: sigma2_eps must be >= 0");
  if (n < 1) throw std::invalid_argument("ols_param_cov: n must be >= 1");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q.m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues().maxCoeff();
  const double smin = svd.singularValues().minCoeff();
  if (smax <= 0.0 || smin / smax < 1e-12)
    throw SingularFitError("ols_param_cov: moment matrix is not invertible",
                           smax > 0.0 ? smin / smax : 0.0);
  Eigen::MatrixXd inv = svd.solve(
      Eigen::MatrixXd::Identity(q.m.rows(), q.m.cols()));
  inv = ((inv + inv.transpose()) / 2.0).eval();
  return ParamCov{(sigma2_eps / static_cast<double>(n)) * inv,
                  CovProvenance::analytic_ols, n};
}

ParamCov empirical_param_cov(const std::vector<Eigen::VectorXd>& samples) {
  if (samples.size() < 2)
    throw std::invalid_argument(
        "empirical_param_cov: need at least two samples");
  const Eigen::Index d = samples.front().size();
  for (const auto& s : samples)
    if (s.size() != d)
      throw std::invalid_argument("empirical_param_cov: ragged samples");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& s : samples) mean += s;
  mean /= static_cast<double>(samples.size());

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& s : samples) {
    const Eigen::VectorXd c = s - mean;
    cov += c * c.transpose();
  }
  cov /= static_cast<double>(samples.size() - 1);
  cov = ((cov + cov.transpose()) / 2.0).eval();
  return ParamCov{std::move(cov), CovProvenance::empirical,
                  static_cast<int>(samples.size())};
}

}  // namespace msf::estimate
