#pragma once

#include <Eigen/Dense>

#include "msf/dgp.hpp"
#include "msf/estimate.hpp"

namespace msf::evtheory {

/// Closed-form irreducible h-step error of the oracle linear predictor on the
/// observed series of the latent AR(2) + measurement noise process:
///   h = 1: sigma_s^2 + (1 + a^2 + gamma^2) * sigma_e^2
///   h = 2: (1 + a^2) * sigma_s^2
///          + (1 + (a^2 + gamma)^2 + (a*gamma)^2) * sigma_e^2
/// Horizons beyond 2 are rejected.
double aleatoric_floor(const dgp::Ar2Params& params, int h);

struct AleatoricFloors {
  double sigma2_eps1 = 0.0;
  double sigma2_eps2 = 0.0;
  dgp::Ar2Params params;
};

AleatoricFloors aleatoric_floors(const dgp::Ar2Params& params);

/// Delta-method estimation variance of the recursive strategy:
/// tr(J Sigma J^T Qtilde), with J the composition Jacobian, Sigma the
/// one-step parameter covariance and Qtilde the composed-feature second
/// moment. Inputs are symmetrized before the trace is taken.
double ev_recursive(const Eigen::MatrixXd& j, const estimate::ParamCov& sigma,
                    const estimate::MomentMatrix& q_tilde);

/// Estimation variance of a strategy fit directly at the target horizon:
/// tr(Sigma_h Q) over the base features.
double ev_direct(const estimate::ParamCov& sigma_h,
                 const estimate::MomentMatrix& q);

/// Variance amplification T_h = tr(J Sigma J^T Qtilde) / tr(Sigma Q).
/// Throws std::domain_error when the one-step baseline trace is not positive.
double amplification(const Eigen::MatrixXd& j, const estimate::ParamCov& sigma,
                     const estimate::MomentMatrix& q_tilde,
                     const estimate::MomentMatrix& q);

inline double ev_delta(double ev_rec, double ev_dir) { return ev_rec - ev_dir; }

struct EvReport {
  int horizon = 0;
  double ev_one_step = 0.0;
  double ev_rec = 0.0;
  double ev_dir = 0.0;
  double t_h = 0.0;      ///< ev_rec / ev_one_step
  double delta_ev = 0.0; ///< ev_rec - ev_dir
};

EvReport make_ev_report(int horizon, const Eigen::MatrixXd& j,
                        const estimate::ParamCov& sigma_one,
                        const estimate::ParamCov& sigma_h,
                        const estimate::MomentMatrix& q_tilde,
                        const estimate::MomentMatrix& q);

}  // namespace msf::evtheory
