#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "msf/rng.hpp"
#include "msf/taskspace.hpp"

using namespace msf::taskspace;
using msf::Rng;
using msf::dgp::Interval;
using msf::dgp::TaskTheta;

namespace {

Eigen::VectorXd g_by_hand(const Eigen::Vector3d& b) {
  Eigen::VectorXd v(5);
  v << b(0) * b(0) + b(1),       // y_t
      b(0) * b(1),               // y_{t-1}
      b(2) * (b(0) + b(1)),      // y_t * y_{t-1}
      b(0) * b(2),               // y_t^2
      b(2) * b(2);               // y_t^2 * y_{t-1}
  return v;
}

TaskTheta on_manifold(const Eigen::Vector3d& b, double theta6 = 0.0) {
  const Eigen::VectorXd a = g_by_hand(b);
  TaskTheta t;
  for (int i = 0; i < 5; ++i) t.theta[static_cast<std::size_t>(i)] = a(i);
  t.theta[5] = theta6;
  return t;
}

/// Independent projection oracle: dense grid over the b cube, then
/// finite-difference Gauss-Newton polish on the best grid point.
double grid_polish_distance(const TaskTheta& theta) {
  Eigen::VectorXd target(5);
  for (int i = 0; i < 5; ++i) target(i) = theta.theta[static_cast<std::size_t>(i)];
  const BilinearTwoStepMap map;

  // Coarse scan over a cube wide enough to contain every plausible
  // projection of a box task, keeping several candidates for polishing.
  const int nsteps = 30;
  std::vector<std::pair<double, Eigen::Vector3d>> cands;
  for (int i = 0; i <= nsteps; ++i)
    for (int j = 0; j <= nsteps; ++j)
      for (int k = 0; k <= nsteps; ++k) {
        Eigen::Vector3d b(-3.0 + 6.0 * i / nsteps, -3.0 + 6.0 * j / nsteps,
                          -3.0 + 6.0 * k / nsteps);
        cands.emplace_back((target - map.g(b)).squaredNorm(), b);
      }
  std::partial_sort(cands.begin(), cands.begin() + 12, cands.end(),
                    [](const auto& x, const auto& y) { return x.first < y.first; });

  double best_sq = cands.front().first;
  const double fd = 1e-6;
  for (int c_idx = 0; c_idx < 12; ++c_idx) {
    Eigen::Vector3d b = cands[static_cast<std::size_t>(c_idx)].second;
    double lambda = 1e-6;
    for (int it = 0; it < 600; ++it) {
      const Eigen::VectorXd r = target - map.g(b);
      Eigen::MatrixXd j(5, 3);
      for (int c = 0; c < 3; ++c) {
        Eigen::Vector3d hi = b, lo = b;
        hi(c) += fd;
        lo(c) -= fd;
        j.col(c) = (map.g(hi) - map.g(lo)) / (2.0 * fd);  // d g / d b_c
      }
      // Levenberg-Marquardt step on ||r - J db||^2.
      const Eigen::Matrix3d h =
          j.transpose() * j + lambda * Eigen::Matrix3d::Identity();
      const Eigen::Vector3d db = h.ldlt().solve(j.transpose() * r);
      const Eigen::Vector3d cand = b + db;
      if ((target - map.g(cand)).squaredNorm() < r.squaredNorm()) {
        b = cand;
        lambda = std::max(lambda * 0.3, 1e-12);
        if (db.norm() < 1e-13) break;
      } else {
        lambda *= 10.0;
        if (lambda > 1e8) break;
      }
    }
    best_sq = std::min(best_sq, (target - map.g(b)).squaredNorm());
  }
  return std::sqrt(best_sq + theta.theta[5] * theta.theta[5]);
}

}  // namespace

TEST_CASE("bilinear two-step map: closed form, Jacobian, composition") {
  const BilinearTwoStepMap map;
  Rng rng(314);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::Vector3d b(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
                      rng.uniform(-1.5, 1.5));
    const Eigen::VectorXd got = map.g(b);
    const Eigen::VectorXd want = g_by_hand(b);
    REQUIRE(got.size() == 5);
    for (int i = 0; i < 5; ++i)
      CHECK(got(i) == doctest::Approx(want(i)).epsilon(1e-12));

    // Analytic Jacobian of the hand formulas.
    Eigen::MatrixXd ja(5, 3);
    ja << 2 * b(0), 1, 0,
        b(1), b(0), 0,
        b(2), b(2), b(0) + b(1),
        b(2), 0, b(0),
        0, 0, 2 * b(2);
    const Eigen::MatrixXd jg = map.jacobian(b);
    REQUIRE(jg.rows() == 5);
    REQUIRE(jg.cols() == 3);
    CHECK((jg - ja).cwiseAbs().maxCoeff() < 1e-12);
  }

  // The exposed composition and g agree as functions of the window: the
  // alpha-weighted support expansion must equal the psi expansion under g(b).
  const Eigen::Vector3d b(0.7, -0.4, 0.3);
  const auto& comp = map.composition();
  REQUIRE(comp.n_alpha() == 5);
  const Eigen::VectorXd alpha_sup = comp.alpha_at(b);
  const Eigen::VectorXd alpha_psi = map.g(b);
  const std::vector<double> window{1.3, -0.8};  // (y_t, y_{t-1})
  double via_support = 0.0;
  for (int j = 0; j < 5; ++j)
    via_support +=
        alpha_sup(j) * comp.support[static_cast<std::size_t>(j)].eval(window);
  const auto psi = msf::dgp::task_basis(window[0], window[1]);
  double via_psi = 0.0;
  for (int i = 0; i < 5; ++i)
    via_psi += alpha_psi(i) * psi[static_cast<std::size_t>(i)];
  CHECK(via_support == doctest::Approx(via_psi).epsilon(1e-12));
}

TEST_CASE("task box: bounds, nesting, validation") {
  const Interval bb{-1.5, 1.5};
  const TaskBox box = build_task_box(5000, bb, 11);

  for (const Interval& iv : box.alpha_bounds) CHECK(iv.lo <= iv.hi);
  // Analytic ranges of each image coordinate over the b cube.
  CHECK(box.alpha_bounds[0].lo >= -1.5 - 1e-12);
  CHECK(box.alpha_bounds[0].hi <= 3.75 + 1e-12);
  CHECK(box.alpha_bounds[1].lo >= -2.25 - 1e-12);
  CHECK(box.alpha_bounds[1].hi <= 2.25 + 1e-12);
  CHECK(box.alpha_bounds[2].lo >= -4.5 - 1e-12);
  CHECK(box.alpha_bounds[2].hi <= 4.5 + 1e-12);
  CHECK(box.alpha_bounds[3].lo >= -2.25 - 1e-12);
  CHECK(box.alpha_bounds[3].hi <= 2.25 + 1e-12);
  // The last coordinate is a square: never negative.
  CHECK(box.alpha_bounds[4].lo >= 0.0);
  CHECK(box.alpha_bounds[4].hi <= 2.25 + 1e-12);
  // With 5000 samples the box is not degenerate.
  CHECK(box.alpha_bounds[0].hi - box.alpha_bounds[0].lo > 1.0);

  // Same seed, fewer samples: a prefix of the stream, hence a nested box.
  const TaskBox small = build_task_box(1000, bb, 11);
  for (int i = 0; i < 5; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    CHECK(small.alpha_bounds[k].lo >= box.alpha_bounds[k].lo);
    CHECK(small.alpha_bounds[k].hi <= box.alpha_bounds[k].hi);
  }

  const auto full = box.as_theta_bounds();
  for (int i = 0; i < 5; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    CHECK(full[k].lo == box.alpha_bounds[k].lo);
    CHECK(full[k].hi == box.alpha_bounds[k].hi);
  }
  CHECK(full[5].lo == box.theta6_bounds.lo);
  CHECK(full[5].hi == box.theta6_bounds.hi);

  CHECK_THROWS_AS((void)build_task_box(0, bb, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)build_task_box(10, Interval{1.0, -1.0}, 1),
                  std::invalid_argument);
}

TEST_CASE("distance to the direct span") {
  TaskTheta t;
  t.theta = {9.0, 9.0, 9.0, 3.0, 4.0, 12.0};
  CHECK(distance_to_direct(t) == doctest::Approx(13.0).epsilon(1e-12));
  t.theta = {0.4, -0.2, 1.1, 0.0, 0.0, 0.0};
  CHECK(distance_to_direct(t) == doctest::Approx(0.0));
}

TEST_CASE("distance to the recursive manifold") {
  // On-manifold tasks project to (numerically) zero distance.
  for (const Eigen::Vector3d& b :
       {Eigen::Vector3d(0.7, -0.4, 0.3), Eigen::Vector3d(-1.1, 0.9, 1.2),
        Eigen::Vector3d(0.0, 0.0, 0.0)}) {
    const RecursiveProjection proj =
        distance_to_recursive(on_manifold(b), 16, 2025);
    CHECK(proj.converged);
    CHECK(proj.n_converged_starts >= 1);
    CHECK(proj.distance < 1e-6);
    const BilinearTwoStepMap map;
    CHECK((map.g(proj.argmin_b) - g_by_hand(b)).norm() < 1e-5);
  }

  // theta6 never enters the family: it adds in quadrature.
  {
    const Eigen::Vector3d b(0.5, 0.3, -0.6);
    const RecursiveProjection proj =
        distance_to_recursive(on_manifold(b, 0.8), 16, 2025);
    CHECK(proj.distance == doctest::Approx(0.8).epsilon(1e-6));
  }

  // Independent dense-grid + polish oracle on random off-manifold tasks.
  const TaskBox box = build_task_box(4000, Interval{-1.5, 1.5}, 7);
  const auto bounds = box.as_theta_bounds();
  for (int k = 0; k < 8; ++k) {
    const TaskTheta theta =
        msf::dgp::sample_task(bounds, msf::derive_seed(606, static_cast<std::uint64_t>(k)));
    const RecursiveProjection proj = distance_to_recursive(theta, 16, 909);
    const double oracle = grid_polish_distance(theta);
    CHECK(proj.distance == doctest::Approx(oracle).epsilon(1e-4));
  }

  CHECK_THROWS_AS((void)distance_to_recursive(TaskTheta{}, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("paired fits on realizable tasks") {
  FitBothConfig cfg;
  cfg.n_train = 512;
  cfg.n_eval = 2048;
  cfg.noise_std = 0.0;
  cfg.n_starts = 16;

  // Recursive-realizable, with genuinely nonlinear coordinates: the bilinear
  // family nails it, the direct family cannot.
  {
    const Eigen::Vector3d b(0.8, -0.3, 0.5);
    const FitBothResult r = fit_both(on_manifold(b), cfg, 51);
    CHECK(r.mse_alpha < 1e-8);
    CHECK(r.mse_c > 1e-3);
    const BilinearTwoStepMap map;
    CHECK((map.g(r.b_hat) - g_by_hand(b)).norm() < 1e-4);
  }

  // Direct-realizable with a cross term: OLS is exact, while the bilinear
  // family cannot produce a lone cross term (b3 != 0 forces square terms).
  {
    TaskTheta t;
    t.theta = {0.5, -0.3, 0.7, 0.0, 0.0, 0.0};
    const FitBothResult r = fit_both(t, cfg, 52);
    CHECK(r.mse_c < 1e-12);
    CHECK(r.mse_alpha > 1e-3);
    CHECK(r.c_hat(0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.c_hat(1) == doctest::Approx(-0.3).epsilon(1e-6));
    CHECK(r.c_hat(2) == doctest::Approx(0.7).epsilon(1e-6));
  }

  // With target noise, the realizable side lands near the noise floor.
  {
    cfg.noise_std = 0.2;
    TaskTheta t;
    t.theta = {0.5, -0.3, 0.7, 0.0, 0.0, 0.0};
    const FitBothResult r = fit_both(t, cfg, 53);
    CHECK(r.mse_c == doctest::Approx(0.04).epsilon(0.25));
  }

  FitBothConfig bad = cfg;
  bad.n_train = 2;
  TaskTheta t;
  CHECK_THROWS_AS((void)fit_both(t, bad, 1), std::invalid_argument);
}

TEST_CASE("ecdf properties") {
  const std::vector<double> sample{3.0, 1.0, 2.0, 2.0};
  const auto pts = ecdf(sample);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].value == doctest::Approx(1.0));
  CHECK(pts[0].fraction == doctest::Approx(0.25));
  CHECK(pts[1].value == doctest::Approx(2.0));
  CHECK(pts[1].fraction == doctest::Approx(0.75));
  CHECK(pts[2].value == doctest::Approx(3.0));
  CHECK(pts[2].fraction == doctest::Approx(1.0));

  const auto single = ecdf({5.5});
  REQUIRE(single.size() == 1);
  CHECK(single[0].value == doctest::Approx(5.5));
  CHECK(single[0].fraction == doctest::Approx(1.0));

  // Values strictly ascending, fractions strictly ascending to exactly 1.
  Rng rng(17);
  std::vector<double> big;
  for (int i = 0; i < 500; ++i) big.push_back(std::round(rng.gaussian() * 4.0));
  const auto cdf = ecdf(big);
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    CHECK(cdf[i].value > cdf[i - 1].value);
    CHECK(cdf[i].fraction > cdf[i - 1].fraction);
  }
  CHECK(cdf.back().fraction == doctest::Approx(1.0));

  CHECK_THROWS_AS((void)ecdf({}), std::invalid_argument);
}

TEST_CASE("taskspace run: determinism, accounting, writers") {
  TaskspaceConfig cfg;
  cfg.n_box_samples = 2000;
  cfg.n_tasks = 40;
  cfg.n_starts = 8;
  cfg.fit.n_train = 256;
  cfg.fit.n_eval = 512;
  cfg.fit.n_starts = 8;
  cfg.validate();

  const TaskspaceResult res = run_taskspace(cfg, 123, 1);
  REQUIRE(res.outcomes.size() == 40);
  CHECK(res.base_seed == 123);
  int skipped = 0;
  for (std::size_t i = 0; i < res.outcomes.size(); ++i) {
    const TaskOutcome& o = res.outcomes[i];
    CHECK(o.task_index == static_cast<int>(i));
    if (o.skipped) {
      ++skipped;
      continue;
    }
    CHECK(o.d_alpha >= 0.0);
    CHECK(o.d_c >= 0.0);
    CHECK(std::isfinite(o.mse_alpha));
    CHECK(std::isfinite(o.mse_c));
    CHECK(o.mse_alpha >= 0.0);
    CHECK(o.mse_c >= 0.0);
  }
  CHECK(res.n_skipped == skipped);
  CHECK(res.n_skipped < 40 / 4);

  // The geometric story: generic tasks sit nearer the curved recursive image
  // than the flat direct span, in distance and in achieved error.
  std::vector<double> da, dc, ma, mc;
  for (const TaskOutcome& o : res.outcomes) {
    if (o.skipped) continue;
    da.push_back(o.d_alpha);
    dc.push_back(o.d_c);
    ma.push_back(o.mse_alpha);
    mc.push_back(o.mse_c);
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  CHECK(median(da) < median(dc));
  CHECK(median(ma) < median(mc));

  // Bitwise determinism across worker counts and reruns.
  const TaskspaceResult par = run_taskspace(cfg, 123, 3);
  REQUIRE(par.outcomes.size() == res.outcomes.size());
  for (std::size_t i = 0; i < res.outcomes.size(); ++i) {
    CHECK(par.outcomes[i].d_alpha == res.outcomes[i].d_alpha);
    CHECK(par.outcomes[i].d_c == res.outcomes[i].d_c);
    CHECK(par.outcomes[i].mse_alpha == res.outcomes[i].mse_alpha);
    CHECK(par.outcomes[i].mse_c == res.outcomes[i].mse_c);
    CHECK(par.outcomes[i].skipped == res.outcomes[i].skipped);
  }
  for (int i = 0; i < 5; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    CHECK(par.box.alpha_bounds[k].lo == res.box.alpha_bounds[k].lo);
    CHECK(par.box.alpha_bounds[k].hi == res.box.alpha_bounds[k].hi);
  }
  const TaskspaceResult other = run_taskspace(cfg, 124, 1);
  CHECK(other.outcomes[0].d_alpha != res.outcomes[0].d_alpha);

  std::ostringstream csv;
  write_tasks_csv(csv, res);
  const std::string text = csv.str();
  CHECK(text.substr(0, text.find('\n')) ==
        "task_index,theta1,theta2,theta3,theta4,theta5,theta6,d_alpha,d_c,"
        "mse_alpha,mse_c,b1,b2,b3,skipped");
  CHECK(std::count(text.begin(), text.end(), '\n') == 41);

  std::ostringstream ec;
  write_ecdf_csv(ec, ecdf(da));
  const std::string etext = ec.str();
  CHECK(etext.substr(0, etext.find('\n')) == "value,fraction");

  auto expect_invalid = [](TaskspaceConfig c) {
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  };
  {
    TaskspaceConfig c = cfg;
    c.n_tasks = 0;
    expect_invalid(c);
  }
  {
    TaskspaceConfig c = cfg;
    c.n_box_samples = 0;
    expect_invalid(c);
  }
  {
    TaskspaceConfig c = cfg;
    c.b_bounds = {2.0, -2.0};
    expect_invalid(c);
  }
  {
    TaskspaceConfig c = cfg;
    c.n_starts = 0;
    expect_invalid(c);
  }
  {
    TaskspaceConfig c = cfg;
    c.fit.noise_std = -0.5;
    expect_invalid(c);
  }
}
