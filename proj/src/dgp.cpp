#include "msf/dgp.hpp"

#include <stdexcept>
#include <string>

#include "msf/csvio.hpp"
#include "msf/rng.hpp"

namespace msf::dgp {

bool is_stable(double a, double gamma) {
  return (a + gamma < 1.0) && (gamma - a < 1.0) && (std::abs(gamma) < 1.0);
}

SeriesPair simulate_ar2(const Ar2Params& params, int n, int burn_in,
                        std::uint64_t seed, bool allow_unstable) {
  if (n < 3)
    throw std::invalid_argument("simulate_ar2: n must be >= 3, got " +
                                std::to_string(n));
  if (burn_in < 0)
    throw std::invalid_argument("simulate_ar2: burn_in must be >= 0");
  if (params.sigma_s < 0.0 || params.sigma_e < 0.0)
    throw std::invalid_argument("simulate_ar2: noise scales must be >= 0");
  if (!allow_unstable && !is_stable(params))
    throw std::invalid_argument(
        "simulate_ar2: (a, gamma) = (" + std::to_string(params.a) + ", " +
        std::to_string(params.gamma) +
        ") is outside the stationarity triangle");

  Rng rng(seed);
  SeriesPair out;
  out.seed = seed;
  out.params = params;
  out.latent.reserve(static_cast<std::size_t>(n));

  double x1 = 0.0, x2 = 0.0;  // x[t-1], x[t-2]; zero initial conditions
  const int total = n + burn_in;
  for (int t = 0; t < total; ++t) {
    const double x = params.a * x1 + params.gamma * x2 +
                     params.sigma_s * rng.gaussian();
    x2 = x1;
    x1 = x;
    if (t >= burn_in) out.latent.push_back(x);
  }

  if (params.sigma_e == 0.0) {
    out.observed = out.latent;
  } else {
    out.observed.reserve(static_cast<std::size_t>(n));
    for (double x : out.latent)
      out.observed.push_back(x + params.sigma_e * rng.gaussian());
  }
  return out;
}

void write_series_csv(std::ostream& os, const SeriesPair& series) {
  os << "t,x,y\n";
  for (std::size_t t = 0; t < series.latent.size(); ++t) {
    os << t << ',' << format_double(series.latent[t]) << ','
       << format_double(series.observed[t]) << '\n';
  }
}

std::array<double, 6> task_basis(double y_t, double y_tm1) {
  return {y_t,        y_tm1,         y_t * y_tm1,
          y_t * y_t,  y_t * y_t * y_tm1, y_tm1 * y_tm1};
}

TaskTheta sample_task(const std::array<Interval, 6>& bounds, std::uint64_t seed) {
  for (const auto& iv : bounds)
    if (!(iv.lo <= iv.hi))
      throw std::invalid_argument("sample_task: empty interval [" +
                                  std::to_string(iv.lo) + ", " +
                                  std::to_string(iv.hi) + "]");
  Rng rng(seed);
  TaskTheta out;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& iv = bounds[i];
    out.theta[i] = iv.lo == iv.hi ? iv.lo : rng.uniform(iv.lo, iv.hi);
  }
  return out;
}

TaskData generate_task_data(const TaskTheta& theta, int n_pairs, double input_std,
                            double noise_std, std::uint64_t seed) {
  if (n_pairs < 1)
    throw std::invalid_argument("generate_task_data: n_pairs must be >= 1");
  if (input_std <= 0.0)
    throw std::invalid_argument("generate_task_data: input_std must be > 0");
  if (noise_std < 0.0)
    throw std::invalid_argument("generate_task_data: noise_std must be >= 0");

  Rng rng(seed);
  TaskData out;
  out.inputs.resize(n_pairs, 2);
  out.targets.resize(n_pairs);
  for (int i = 0; i < n_pairs; ++i) {
    const double y_t = input_std * rng.gaussian();
    const double y_tm1 = input_std * rng.gaussian();
    out.inputs(i, 0) = y_t;
    out.inputs(i, 1) = y_tm1;
    const auto psi = task_basis(y_t, y_tm1);
    double value = 0.0;
    for (std::size_t k = 0; k < 6; ++k) value += theta.theta[k] * psi[k];
    if (noise_std > 0.0) value += noise_std * rng.gaussian();
    out.targets[i] = value;
  }
  return out;
}

}  // namespace msf::dgp
