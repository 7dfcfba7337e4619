#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>
#include <vector>

#include "msf/polypred.hpp"

namespace msf::estimate {

/// Thrown when a least-squares problem is numerically singular; carries the
/// reciprocal condition estimate that tripped the gate.
struct SingularFitError : std::runtime_error {
  SingularFitError(const std::string& msg, double rcond_estimate)
      : std::runtime_error(msg), rcond(rcond_estimate) {}
  double rcond;
};

struct DesignMatrix {
  Eigen::MatrixXd rows;     ///< n x p lag windows, newest lag first
  Eigen::VectorXd targets;  ///< y shifted h steps ahead of the window head
  int p = 0;
  int h = 0;
};

/// Builds the h-step-ahead regression design from a scalar series:
/// row i = (y[p-1+i], ..., y[i]), target y[p-1+i+h]. Requires
/// len(series) > p + h - 1 so that at least one row exists.
DesignMatrix build_design(std::span<const double> series, int p, int h);

/// All p-lag windows of the series (newest first), one row per position,
/// with no target alignment: the prediction-point matrix for variance work.
Eigen::MatrixXd lag_window_matrix(std::span<const double> series, int p);

/// OLS without intercept via column-pivoted Householder QR. Throws
/// SingularFitError when the reciprocal condition estimate (ratio of extreme
/// |R| diagonal entries) drops below 1e-12.
Eigen::VectorXd ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);
Eigen::VectorXd ols_fit(const DesignMatrix& design);

enum class MomentKind { base, composed };

/// Symmetrized second-moment matrix (1/n) X^T X, validated symmetric and
/// positive semidefinite on construction.
struct MomentMatrix {
  Eigen::MatrixXd m;
  MomentKind kind = MomentKind::base;
};

MomentMatrix second_moment(const Eigen::MatrixXd& features,
                           MomentKind kind = MomentKind::base);

/// Second moment of the composed feature map: every monomial in the
/// composition's support evaluated on every p-lag window of the series.
MomentMatrix composed_second_moment(std::span<const double> series,
                                    const polypred::CompositionResult& comp);

enum class CovProvenance { analytic_ols, empirical };

struct ParamCov {
  Eigen::MatrixXd sigma;
  CovProvenance provenance = CovProvenance::analytic_ols;
  int n_used = 0;  ///< training size (analytic) or sample count (empirical)
};

/// Asymptotic OLS parameter covariance (sigma2_eps / n) * Q^{-1}.
ParamCov ols_param_cov(double sigma2_eps, int n, const MomentMatrix& q);

/// Sample covariance across parameter draws (divisor n-1).
ParamCov empirical_param_cov(const std::vector<Eigen::VectorXd>& samples);

}  // namespace msf::estimate
