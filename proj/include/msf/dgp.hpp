#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

namespace msf::dgp {

/// Latent AR(2) with additive measurement noise:
///   x[t] = a*x[t-1] + gamma*x[t-2] + w[t],   w ~ N(0, sigma_s^2)
///   y[t] = x[t] + v[t],                      v ~ N(0, sigma_e^2)
struct Ar2Params {
  double a = 0.0;
  double gamma = 0.0;
  double sigma_s = 1.0;
  double sigma_e = 0.0;
};

/// Stationarity triangle: a + gamma < 1, gamma - a < 1, |gamma| < 1.
bool is_stable(double a, double gamma);
inline bool is_stable(const Ar2Params& p) { return is_stable(p.a, p.gamma); }

struct SeriesPair {
  std::vector<double> latent;
  std::vector<double> observed;
  std::uint64_t seed = 0;
  Ar2Params params;
};

/// Simulates n kept samples after discarding burn_in, from zero initial
/// conditions. Draw order is fixed: one latent innovation per step, then one
/// measurement draw per kept sample (skipped entirely when sigma_e == 0).
SeriesPair simulate_ar2(const Ar2Params& params, int n, int burn_in,
                        std::uint64_t seed, bool allow_unstable = false);

/// CSV dump with header t,x,y.
void write_series_csv(std::ostream& os, const SeriesPair& series);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// A task in the two-lag quadratic feature basis
///   psi = [y_t, y_{t-1}, y_t*y_{t-1}, y_t^2, y_t^2*y_{t-1}, y_{t-1}^2].
struct TaskTheta {
  std::array<double, 6> theta{};
};

/// psi evaluated at an input pair.
std::array<double, 6> task_basis(double y_t, double y_tm1);

/// Uniform draw per coordinate; degenerate [c, c] intervals return c.
TaskTheta sample_task(const std::array<Interval, 6>& bounds, std::uint64_t seed);

struct TaskData {
  Eigen::MatrixXd inputs;   ///< n x 2, columns (y_t, y_{t-1})
  Eigen::VectorXd targets;  ///< theta . psi(input) + noise
};

/// Gaussian input pairs (iid N(0, input_std^2) per coordinate) with targets
/// theta . psi plus N(0, noise_std^2) target noise.
TaskData generate_task_data(const TaskTheta& theta, int n_pairs, double input_std,
                            double noise_std, std::uint64_t seed);

}  // namespace msf::dgp
