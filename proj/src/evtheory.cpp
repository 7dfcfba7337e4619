#include "msf/evtheory.hpp"

#include <stdexcept>
#include <string>

namespace msf::evtheory {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return (m + m.transpose()) / 2.0;
}

}  // namespace

double aleatoric_floor(const dgp::Ar2Params& params, int h) {
  const double a = params.a;
  const double g = params.gamma;
  const double s2 = params.sigma_s * params.sigma_s;
  const double e2 = params.sigma_e * params.sigma_e;
  if (h == 1) return s2 + (1.0 + a * a + g * g) * e2;
  if (h == 2) {
    const double c1 = a * a + g;
    const double c2 = a * g;
    return (1.0 + a * a) * s2 + (1.0 + c1 * c1 + c2 * c2) * e2;
  }
  throw std::invalid_argument(
      "aleatoric_floor: closed forms cover horizons 1 and 2, got h = " +
      std::to_string(h));
}

AleatoricFloors aleatoric_floors(const dgp::Ar2Params& params) {
  return AleatoricFloors{aleatoric_floor(params, 1), aleatoric_floor(params, 2),
                         params};
}

double ev_recursive(const Eigen::MatrixXd& j, const estimate::ParamCov& sigma,
                    const estimate::MomentMatrix& q_tilde) {
  if (sigma.sigma.rows() != j.cols())
    throw std::invalid_argument(
        "ev_recursive: Jacobian columns must match parameter covariance size");
  if (q_tilde.m.rows() != j.rows())
    throw std::invalid_argument(
        "ev_recursive: Qtilde size must match Jacobian rows");
  const Eigen::MatrixXd s = symmetrized(sigma.sigma);
  const Eigen::MatrixXd qt = symmetrized(q_tilde.m);
  return (j * s * j.transpose() * qt).trace();
}

double ev_direct(const estimate::ParamCov& sigma_h,
                 const estimate::MomentMatrix& q) {
  if (sigma_h.sigma.rows() != q.m.rows())
    throw std::invalid_argument("ev_direct: dimension mismatch");
  return (symmetrized(sigma_h.sigma) * symmetrized(q.m)).trace();
}

double amplification(const Eigen::MatrixXd& j, const estimate::ParamCov& sigma,
                     const estimate::MomentMatrix& q_tilde,
                     const estimate::MomentMatrix& q) {
  const double baseline = ev_direct(sigma, q);
  if (!(baseline > 0.0))
    throw std::domain_error(
        "amplification: one-step baseline tr(Sigma Q) is not positive (" +
        std::to_string(baseline) + ")");
  return ev_recursive(j, sigma, q_tilde) / baseline;
}

EvReport make_ev_report(int horizon, const Eigen::MatrixXd& j,
                        const estimate::ParamCov& sigma_one,
                        const estimate::ParamCov& sigma_h,
                        const estimate::MomentMatrix& q_tilde,
                        const estimate::MomentMatrix& q) {
  EvReport report;
  report.horizon = horizon;
  report.ev_one_step = ev_direct(sigma_one, q);
  report.ev_rec = ev_recursive(j, sigma_one, q_tilde);
  report.ev_dir = ev_direct(sigma_h, q);
  report.t_h = amplification(j, sigma_one, q_tilde, q);
  report.delta_ev = ev_delta(report.ev_rec, report.ev_dir);
  return report;
}

}  // namespace msf::evtheory
