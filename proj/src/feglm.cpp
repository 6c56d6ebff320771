#include "perceptfe/feglm.hpp"

#include <cmath>
#include <sstream>

#include "perceptfe/demean.hpp"
#include "perceptfe/errors.hpp"
#include "perceptfe/lsq.hpp"
#include "perceptfe/stats.hpp"
#include "perceptfe/vcov.hpp"

namespace pfe {

namespace {

constexpr double kMinWeight = 1e-10;

double deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
  double dev = 0.0;
  for (long i = 0; i < y.size(); ++i) {
    double m = std::min(1.0 - 1e-15, std::max(1e-15, mu(i)));
    dev += y(i) > 0.5 ? std::log(m) : std::log1p(-m);
  }
  return -2.0 * dev;
}

}  // namespace

double feglm_loglik(const DesignMatrix& M, const Eigen::VectorXd& beta,
                    const Eigen::VectorXd& alpha, Eigen::VectorXd* grad_beta,
                    Eigen::VectorXd* grad_alpha) {
  const auto& driver = M.fe_levels.empty() ? M.driver : M.fe_levels[0];
  double ll = 0.0;
  if (grad_beta) grad_beta->setZero(M.X.cols());
  if (grad_alpha) grad_alpha->setZero(alpha.size());
  auto softplus = [](double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); };
  for (long i = 0; i < M.rows(); ++i) {
    double eta = M.X.row(i).dot(beta) + alpha(driver[i]);
    double mu = logistic(eta);
    ll += M.y(i) > 0.5 ? eta - softplus(eta) : -softplus(eta);
    double resid = M.y(i) - mu;
    if (grad_beta) *grad_beta += resid * M.X.row(i).transpose();
    if (grad_alpha) (*grad_alpha)(driver[i]) += resid;
  }
  return ll;
}

FitResult fit_feglm_logit(const std::vector<DriverPanel>& panels, const ModelSpec& spec,
                          const FitOptions& opts, Exec exec) {
  DesignMatrix M = build_design(panels, spec);
  return fit_feglm_design(M, spec, opts, exec);
}

FitResult fit_feglm_design(const DesignMatrix& M0, const ModelSpec& spec,
                           const FitOptions& opts, Exec exec) {
  if (spec.estimator != Estimator::FeglmLogit)
    throw SpecificationError("fit_feglm_design requires estimator = feglm_logit");
  if (M0.rows() == 0) throw EmptySampleError("no usable rows for feglm_logit");
  if (M0.fe_levels.size() != 1)
    throw SpecificationError("feglm_logit absorbs exactly the driver dimension");

  // Drivers with all-0 or all-1 outcomes: the intercept diverges.
  std::vector<long> n_rows(M0.n_drivers, 0), n_ones(M0.n_drivers, 0);
  for (long i = 0; i < M0.rows(); ++i) {
    n_rows[M0.driver[i]]++;
    if (M0.y(i) > 0.5) n_ones[M0.driver[i]]++;
  }
  long n_separated = 0;
  for (int32_t g = 0; g < M0.n_drivers; ++g)
    if (n_ones[g] == 0 || n_ones[g] == n_rows[g]) ++n_separated;
  std::vector<long> keep;
  for (long i = 0; i < M0.rows(); ++i) {
    int32_t g = M0.driver[i];
    if (n_ones[g] > 0 && n_ones[g] < n_rows[g]) keep.push_back(i);
  }
  if (keep.empty())
    throw EmptySampleError("every driver is separated (all-0 or all-1 outcomes)");
  DesignMatrix M = design_subset(M0, keep);

  const long n = M.rows();
  const long p = M.X.cols();
  const auto& driver = M.fe_levels[0];
  const int32_t G = M.fe_n_levels[0];
  const int32_t* dptr = driver.data();

  // Smoothed empirical-logit start for the driver intercepts.
  Eigen::VectorXd alpha(G);
  {
    std::vector<long> cnt(G, 0), ones(G, 0);
    for (long i = 0; i < n; ++i) {
      cnt[driver[i]]++;
      if (M.y(i) > 0.5) ones[driver[i]]++;
    }
    for (int32_t g = 0; g < G; ++g) {
      double pbar = (ones[g] + 0.5) / (cnt[g] + 1.0);
      alpha(g) = std::log(pbar / (1.0 - pbar));
    }
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd eta(n);
  for (long i = 0; i < n; ++i) eta(i) = alpha(driver[i]);

  std::vector<double> dev_path;
  Eigen::VectorXd mu(n), w(n), z(n);
  for (long i = 0; i < n; ++i) mu(i) = logistic(eta(i));
  double dev = deviance(M.y, mu);
  dev_path.push_back(dev);

  std::vector<int> kept_cols;
  std::vector<int> dropped_cols;
  Eigen::MatrixXd A;   // sqrt-weighted demeaned design over kept columns
  Eigen::VectorXd b;
  Eigen::MatrixXd R;
  int rank = 0;
  bool converged = false;
  int iterations = 0;

  for (int iter = 1; iter <= kFeglmMaxIter; ++iter) {
    iterations = iter;
    for (long i = 0; i < n; ++i) {
      mu(i) = logistic(eta(i));
      w(i) = std::max(kMinWeight, mu(i) * (1.0 - mu(i)));
      z(i) = eta(i) + (M.y(i) - mu(i)) / w(i);
    }

    // Weighted within-driver demeaning of the working response and design.
    Eigen::VectorXd zt = z;
    Eigen::MatrixXd Xt = M.X;
    {
      std::vector<double*> cols;
      cols.push_back(zt.data());
      for (long j = 0; j < p; ++j) cols.push_back(Xt.col(j).data());
      std::vector<const int32_t*> dims = {dptr};
      std::vector<int32_t> dim_levels = {G};
      demean_columns(cols, n, dims, dim_levels, w.data(), kProjTol, kProjMaxIter, exec);
    }

    Eigen::VectorXd sq = w.array().sqrt();
    if (iter == 1) {
      Eigen::MatrixXd Afull = sq.asDiagonal() * Xt;
      Eigen::VectorXd bfull = sq.asDiagonal() * zt;
      LsqResult ls = lsq_rank_revealing(Afull, bfull, kPivotTol, exec);
      if (ls.kept.empty() || ls.kept.front() != 0)
        throw IdentificationError("treatment collinear with driver fixed effects");
      kept_cols = ls.kept;
      dropped_cols = ls.dropped;
      rank = ls.rank;
      beta = ls.beta;
      R = ls.R;
    } else {
      A.resize(n, rank);
      for (int k = 0; k < rank; ++k) A.col(k) = sq.array() * Xt.col(kept_cols[k]).array();
      b = sq.array() * zt.array();
      LsqResult ls = lsq_rank_revealing(A, b, kPivotTol, exec);
      beta.setZero();
      for (int k = 0; k < rank; ++k) beta(kept_cols[k]) = ls.beta(k);
      R = ls.R;
    }

    // Profile out the intercepts given the new slope.
    Eigen::VectorXd partial = z - M.X * beta;
    Eigen::VectorXd num = Eigen::VectorXd::Zero(G), den = Eigen::VectorXd::Zero(G);
    for (long i = 0; i < n; ++i) {
      num(driver[i]) += w(i) * partial(i);
      den(driver[i]) += w(i);
    }
    for (int32_t g = 0; g < G; ++g) alpha(g) = num(g) / den(g);
    for (long i = 0; i < n; ++i) eta(i) = alpha(driver[i]) + M.X.row(i).dot(beta);

    for (long i = 0; i < n; ++i) mu(i) = logistic(eta(i));
    double dev_new = deviance(M.y, mu);
    dev_path.push_back(dev_new);
    double rel = std::abs(dev_new - dev) / (0.1 + std::abs(dev_new));
    dev = dev_new;
    if (rel < kFeglmDevTol) {
      converged = true;
      break;
    }
  }

  if (!converged) {
    std::ostringstream msg;
    msg << "feglm_logit did not converge in " << kFeglmMaxIter << " iterations; deviance path:";
    size_t start = dev_path.size() > 6 ? dev_path.size() - 6 : 0;
    for (size_t i = start; i < dev_path.size(); ++i) msg << ' ' << dev_path[i];
    throw NumericalError(msg.str(), dev_path.back());
  }

  // Sandwich on the working model at convergence: bread from the final
  // weighted demeaned design, meat from driver-summed scores x~ * (y - mu).
  for (long i = 0; i < n; ++i) {
    mu(i) = logistic(eta(i));
    w(i) = std::max(kMinWeight, mu(i) * (1.0 - mu(i)));
    z(i) = eta(i) + (M.y(i) - mu(i)) / w(i);
  }
  Eigen::VectorXd zt = z;
  Eigen::MatrixXd Xt = M.X;
  {
    std::vector<double*> cols;
    cols.push_back(zt.data());
    for (long j = 0; j < p; ++j) cols.push_back(Xt.col(j).data());
    std::vector<const int32_t*> dims = {dptr};
    std::vector<int32_t> dim_levels = {G};
    demean_columns(cols, n, dims, dim_levels, w.data(), kProjTol, kProjMaxIter, exec);
  }
  Eigen::VectorXd sq = w.array().sqrt();
  A.resize(n, rank);
  for (int k = 0; k < rank; ++k) A.col(k) = sq.array() * Xt.col(kept_cols[k]).array();
  {
    // Plain QR: the kept columns stay independent once weights stabilize.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    R = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
  }
  Eigen::VectorXd u(n);
  for (long i = 0; i < n; ++i) u(i) = (M.y(i) - mu(i)) / sq(i);

  double k_eff = rank + absorbed_dof_clustered(M.fe_levels, M.fe_n_levels, M.cluster);
  Eigen::MatrixXd V = cluster_robust_vcov(A, u, M.cluster, M.n_clusters, k_eff, R, exec);

  // Diagnostic: profile score norm at the solution.
  Eigen::VectorXd grad_beta;
  feglm_loglik(M, beta, alpha, &grad_beta, nullptr);
  Eigen::VectorXd grad_kept(rank);
  for (int k = 0; k < rank; ++k) grad_kept(k) = grad_beta(kept_cols[k]);

  FitResult out;
  out.scale = "log-odds";
  out.delta_hat = beta(0);
  out.se_delta = std::sqrt(std::max(0.0, V(0, 0)));
  out.ci_lo = out.delta_hat - kZ95 * out.se_delta;
  out.ci_hi = out.delta_hat + kZ95 * out.se_delta;
  out.p_value = out.se_delta > 0.0 ? two_sided_p(out.delta_hat / out.se_delta) : 0.0;
  for (int k = 1; k < rank; ++k)
    out.beta.emplace_back(M.col_names[kept_cols[k]], beta(kept_cols[k]));
  for (int j : dropped_cols) out.dropped_collinear.push_back(M.col_names[j]);
  out.n_obs_used = n;
  out.n_drivers_used = G;
  out.n_separated_dropped = n_separated;
  out.n_rows_dropped_missing = M.n_rows_dropped_missing;
  out.n_rows_dropped_nonpair = M.n_rows_dropped_nonpair;
  out.iterations = iterations;
  out.final_grad_norm = grad_kept.norm();
  out.converged = true;
  if (opts.keep_residuals) {
    Eigen::VectorXd resid(n);
    for (long i = 0; i < n; ++i) resid(i) = M.y(i) - mu(i);
    out.residuals = resid;
  }
  if (opts.keep_fixed_effects) {
    out.fixed_effects = {{alpha.data(), alpha.data() + alpha.size()}};
  }
  return out;
}

}  // namespace pfe
