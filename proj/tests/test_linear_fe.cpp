#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "perceptfe/errors.hpp"
#include "perceptfe/demean.hpp"
#include "perceptfe/linear_fe.hpp"
#include "perceptfe/lsq.hpp"
#include "perceptfe/vcov.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace pfe;
using pfe::testing::make_panel;
using pfe::testing::make_stop;

namespace {

DriverPanel two_stop_driver(const std::string& id, bool r0, bool y0, bool r1, bool y1) {
  auto s0 = make_stop(State::AZ, id + "_0", {2016, 1, 1}, r0 ? Race::Hispanic : Race::White, y0);
  auto s1 = make_stop(State::AZ, id + "_1", {2016, 2, 1}, r1 ? Race::Hispanic : Race::White, y1);
  return make_panel(id, {s0, s1});
}

}  // namespace

TEST_CASE("two drivers with within-slopes 1 and 0 give delta = 0.5") {
  auto d1 = two_stop_driver("a", false, false, true, true);
  auto d2 = two_stop_driver("b", false, false, true, false);
  ModelSpec spec;
  auto fit = fit_linear_fe({d1, d2}, spec);
  CHECK(fit.delta_hat == doctest::Approx(50.0).epsilon(1e-12));  // 0.5 in outcome units
  CHECK(fit.n_obs_used == 4);
  CHECK(fit.n_drivers_used == 2);
  CHECK(fit.scale == "percentage points");
  CHECK(fit.ci_lo == doctest::Approx(fit.delta_hat - 1.96 * fit.se_delta));
  CHECK(fit.ci_hi == doctest::Approx(fit.delta_hat + 1.96 * fit.se_delta));
}

TEST_CASE("treatment constant within every driver is an identification error") {
  auto d1 = two_stop_driver("a", true, false, true, true);
  auto d2 = two_stop_driver("b", false, true, false, false);
  ModelSpec spec;
  CHECK_THROWS_AS(fit_linear_fe({d1, d2}, spec), IdentificationError);
}

TEST_CASE("empty inputs raise empty-sample errors") {
  ModelSpec spec;
  CHECK_THROWS_AS(fit_linear_fe({}, spec), EmptySampleError);

  // Only singleton drivers.
  auto p = make_panel("a", {make_stop(State::AZ, "1", {2016, 1, 1}, Race::White, false)});
  auto q = make_panel("b", {make_stop(State::AZ, "2", {2016, 1, 1}, Race::Hispanic, true)});
  CHECK_THROWS_AS(fit_linear_fe({p, q}, spec), EmptySampleError);
}

TEST_CASE("singleton drivers are dropped and counted before the solve") {
  auto d1 = two_stop_driver("a", false, false, true, true);
  auto d2 = two_stop_driver("b", false, true, true, true);
  auto single = make_panel("c", {make_stop(State::AZ, "c_0", {2016, 1, 1}, Race::White, true)});
  ModelSpec spec;
  auto fit = fit_linear_fe({d1, d2, single}, spec);
  CHECK(fit.n_singletons_dropped == 1);
  CHECK(fit.n_obs_used == 4);
  CHECK(fit.n_drivers_used == 2);

  // The singleton cannot move the estimate.
  auto without = fit_linear_fe({d1, d2}, spec);
  CHECK(fit.delta_hat == doctest::Approx(without.delta_hat).epsilon(1e-14));
  CHECK(fit.se_delta == doctest::Approx(without.se_delta).epsilon(1e-14));
}

TEST_CASE("frisch-waugh-lovell: absorbed fit equals explicit dummy regression") {
  std::mt19937_64 rng(101);
  const unsigned control_sets[] = {kControlsNone, kControlLocationTime, kControlOfficer,
                                   kControlDuration};
  for (int trial = 0; trial < 25; ++trial) {
    pfe::testing::RandomPanelOptions opt;
    opt.n_drivers = 5 + static_cast<int>(rng() % 30);
    opt.max_stops = 6;
    opt.min_stops = 1;
    auto panels = pfe::testing::random_panels(rng, opt);
    for (unsigned controls : control_sets) {
      ModelSpec spec;
      spec.controls = controls;
      if (controls & kControlOfficer) spec.fe_dims = {FeDim::Driver, FeDim::Officer};
      DesignMatrix M = build_design(panels, spec);
      FitResult fit;
      try {
        fit = fit_linear_design(M, spec);
      } catch (const IdentificationError&) {
        continue;  // degenerate draw: no within-driver treatment variation
      } catch (const InferenceError&) {
        continue;
      }
      double oracle = pfe::testing::dummy_regression_delta(M);
      if (std::isnan(oracle)) continue;  // treatment not identified in this draw
      CHECK(std::abs(fit.delta_hat / 100.0 - oracle) <= 1e-8);
    }
  }
}

TEST_CASE("duplicating every cluster leaves the estimate unchanged") {
  std::mt19937_64 rng(103);
  pfe::testing::RandomPanelOptions opt;
  opt.n_drivers = 25;
  auto panels = pfe::testing::random_panels(rng, opt);
  ModelSpec spec;
  auto base = fit_linear_fe(panels, spec);

  std::vector<DriverPanel> doubled = panels;
  for (auto p : panels) {
    p.driver_id += "_copy";
    for (auto& s : p.stops) s.stop_id += "_copy";
    doubled.push_back(std::move(p));
  }
  auto twice = fit_linear_fe(doubled, spec);
  CHECK(twice.delta_hat == doctest::Approx(base.delta_hat).epsilon(1e-12));
}

TEST_CASE("scale equivariance at the design level") {
  std::mt19937_64 rng(107);
  pfe::testing::RandomPanelOptions opt;
  opt.n_drivers = 30;
  auto panels = pfe::testing::random_panels(rng, opt);
  ModelSpec spec;
  DesignMatrix M = build_design(panels, spec);
  auto base = fit_linear_design(M, spec);
  DesignMatrix scaled = M;
  scaled.y *= 100.0;
  auto big = fit_linear_design(scaled, spec);
  CHECK(big.delta_hat == doctest::Approx(100.0 * base.delta_hat).epsilon(1e-12));
  CHECK(big.se_delta == doctest::Approx(100.0 * base.se_delta).epsilon(1e-12));
  CHECK(std::abs(big.p_value - base.p_value) <= 1e-12);
}

TEST_CASE("order invariance: permuting panels and stops") {
  std::mt19937_64 rng(109);
  pfe::testing::RandomPanelOptions opt;
  opt.n_drivers = 20;
  auto panels = pfe::testing::random_panels(rng, opt);
  ModelSpec spec;
  spec.controls = kControlLocationTime;
  FitResult base;
  try {
    base = fit_linear_fe(panels, spec);
  } catch (const Error&) {
    return;
  }
  for (int trial = 0; trial < 3; ++trial) {
    std::shuffle(panels.begin(), panels.end(), rng);
    auto fit = fit_linear_fe(panels, spec);
    CHECK(fit.delta_hat == doctest::Approx(base.delta_hat).epsilon(1e-12));
    CHECK(fit.se_delta == doctest::Approx(base.se_delta).epsilon(1e-12));
    CHECK(fit.n_obs_used == base.n_obs_used);
    CHECK(fit.n_drivers_used == base.n_drivers_used);
  }
}

TEST_CASE("a county visited by a single driver is absorbed and dropped as collinear") {
  std::mt19937_64 rng(113);
  pfe::testing::RandomPanelOptions opt;
  opt.n_drivers = 12;
  opt.min_stops = 2;
  opt.n_counties = 2;
  auto panels = pfe::testing::random_panels(rng, opt);
  // One extra driver whose stops all sit in an otherwise-unvisited county:
  // its dummy equals that driver's indicator and must be dropped.
  auto lone = two_stop_driver("lone", false, false, true, true);
  for (auto& s : lone.stops) {
    s.county = "zz_lone_county";
    s.hour = 9;
  }
  panels.push_back(lone);

  ModelSpec spec;
  spec.controls = kControlLocationTime;
  DesignMatrix M = build_design(panels, spec);
  auto fit = fit_linear_design(M, spec);
  bool dropped = false;
  for (const auto& name : fit.dropped_collinear)
    if (name == "county=zz_lone_county") dropped = true;
  CHECK(dropped);

  // Rank check of the full dummy matrix confirms the deficiency.
  std::vector<long> keep;
  std::vector<long> per_driver(M.n_drivers, 0);
  for (long i = 0; i < M.rows(); ++i) per_driver[M.driver[i]]++;
  for (long i = 0; i < M.rows(); ++i)
    if (per_driver[M.driver[i]] > 1) keep.push_back(i);
  DesignMatrix S = design_subset(M, keep);
  long p = S.X.cols();
  for (int32_t L : S.fe_n_levels) p += L;
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(S.rows(), p);
  Z.leftCols(S.X.cols()) = S.X;
  long off = S.X.cols();
  for (size_t d = 0; d < S.fe_levels.size(); ++d) {
    for (long i = 0; i < S.rows(); ++i) Z(i, off + S.fe_levels[d][i]) = 1.0;
    off += S.fe_n_levels[d];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  qr.setThreshold(1e-8);
  CHECK(qr.rank() < Z.cols());
}

TEST_CASE("cluster vcov: singleton clusters reproduce the hc1 heteroskedastic form") {
  std::mt19937_64 rng(127);
  std::normal_distribution<double> gauss;
  const long n = 60;
  const int k = 3;
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd e(n);
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) X(i, j) = gauss(rng);
    e(i) = gauss(rng);
  }
  std::vector<int32_t> cluster(n);
  for (long i = 0; i < n; ++i) cluster[i] = static_cast<int32_t>(i);

  auto ls = lsq_rank_revealing(X, Eigen::VectorXd::Zero(n));
  Eigen::MatrixXd V = cluster_robust_vcov(X, e, cluster, n, k, ls.R);

  Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (long i = 0; i < n; ++i)
    meat += e(i) * e(i) * X.row(i).transpose() * X.row(i);
  Eigen::MatrixXd hc1 = (double(n) / (n - k)) * xtx_inv * meat * xtx_inv;
  CHECK((V - hc1).cwiseAbs().maxCoeff() < 1e-10 * hc1.cwiseAbs().maxCoeff());
}

TEST_CASE("cluster vcov: fewer than two clusters is an inference error") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(4, 1);
  Eigen::VectorXd e = Eigen::VectorXd::Ones(4);
  std::vector<int32_t> cluster = {0, 0, 0, 0};
  auto ls = lsq_rank_revealing(X, Eigen::VectorXd::Zero(4));
  CHECK_THROWS_AS(cluster_robust_vcov(X, e, cluster, 1, 1, ls.R), InferenceError);
}

TEST_CASE("clustered se tracks the classical se on homoskedastic panels") {
  std::mt19937_64 rng(131);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // 5000 drivers x 2 stops, iid noise; the outcome is continuous here, so
  // feed the design directly.
  const int G = 5000;
  std::vector<DriverPanel> panels;
  for (int g = 0; g < G; ++g) {
    auto p = two_stop_driver("d" + std::to_string(g), unif(rng) < 0.5, false,
                             unif(rng) < 0.5, false);
    panels.push_back(std::move(p));
  }
  ModelSpec spec;
  DesignMatrix M = build_design(panels, spec);
  for (long i = 0; i < M.rows(); ++i) M.y(i) = 0.3 * M.X(i, 0) + gauss(rng);

  auto fit = fit_linear_design(M, spec);

  // Classical route: sigma^2 (X~'X~)^{-1} with the absorbed dof.
  DesignMatrix D = M;
  std::vector<long> keep;
  std::vector<long> per_driver(D.n_drivers, 0);
  for (long i = 0; i < D.rows(); ++i) per_driver[D.driver[i]]++;
  for (long i = 0; i < D.rows(); ++i)
    if (per_driver[D.driver[i]] > 1) keep.push_back(i);
  D = design_subset(D, keep);
  absorb_fixed_effects(D);
  auto ls = lsq_rank_revealing(D.X, D.y);
  Eigen::VectorXd resid = D.y - D.X * ls.beta;
  double k_eff = ls.rank + absorbed_dof(D.fe_levels, D.fe_n_levels);
  double sigma2 = resid.squaredNorm() / (D.rows() - k_eff);
  double se_classical =
      100.0 * std::sqrt(sigma2 * (D.X.transpose() * D.X).inverse()(0, 0));
  CHECK(std::abs(fit.se_delta - se_classical) / se_classical < 0.10);
}
