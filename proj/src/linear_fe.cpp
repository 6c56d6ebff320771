#include "perceptfe/linear_fe.hpp"

#include <cmath>

#include "perceptfe/demean.hpp"
#include "perceptfe/errors.hpp"
#include "perceptfe/lsq.hpp"
#include "perceptfe/stats.hpp"
#include "perceptfe/vcov.hpp"

namespace pfe {

FitResult fit_linear_fe(const std::vector<DriverPanel>& panels, const ModelSpec& spec,
                        const FitOptions& opts, Exec exec) {
  DesignMatrix M = build_design(panels, spec);
  return fit_linear_design(M, spec, opts, exec);
}

FitResult fit_linear_design(const DesignMatrix& M0, const ModelSpec& spec,
                            const FitOptions& opts, Exec exec) {
  if (spec.estimator != Estimator::LinearFE)
    throw SpecificationError("fit_linear_design requires estimator = linear_fe");
  if (M0.rows() == 0) throw EmptySampleError("no usable rows for linear_fe");

  // Drivers contributing a single usable row only fit their own intercept;
  // drop them before the solve.
  std::vector<long> rows_per_driver(M0.n_drivers, 0);
  for (long i = 0; i < M0.rows(); ++i) rows_per_driver[M0.driver[i]]++;
  long singles = 0;
  for (long c : rows_per_driver)
    if (c == 1) ++singles;
  std::vector<long> keep;
  keep.reserve(M0.rows());
  for (long i = 0; i < M0.rows(); ++i)
    if (rows_per_driver[M0.driver[i]] > 1) keep.push_back(i);
  if (keep.empty()) throw EmptySampleError("no drivers with more than one usable row");
  DesignMatrix M = design_subset(M0, keep);

  DesignMatrix original;
  if (opts.keep_fixed_effects) original = M;

  AbsorbStats absorb = absorb_fixed_effects(M, kProjTol, kProjMaxIter, exec);

  LsqResult ls = lsq_rank_revealing(M.X, M.y, kPivotTol, exec);
  if (!ls.kept.empty() && ls.kept.front() != 0)
    throw IdentificationError("treatment collinear with fixed effects");
  if (ls.kept.empty() || ls.rank == 0)
    throw IdentificationError("treatment collinear with fixed effects");

  Eigen::VectorXd resid = M.y - M.X * ls.beta;

  Eigen::MatrixXd Xk(M.rows(), ls.rank);
  for (int k = 0; k < ls.rank; ++k) Xk.col(k) = M.X.col(ls.kept[k]);

  double k_eff = ls.rank + absorbed_dof_clustered(M.fe_levels, M.fe_n_levels, M.cluster);
  Eigen::MatrixXd V =
      cluster_robust_vcov(Xk, resid, M.cluster, M.n_clusters, k_eff, ls.R, exec);

  FitResult out;
  const double delta_raw = ls.beta(0);
  const double se_raw = std::sqrt(std::max(0.0, V(0, 0)));
  out.scale = "percentage points";
  out.delta_hat = 100.0 * delta_raw;
  out.se_delta = 100.0 * se_raw;
  out.ci_lo = out.delta_hat - kZ95 * out.se_delta;
  out.ci_hi = out.delta_hat + kZ95 * out.se_delta;
  out.p_value = se_raw > 0.0 ? two_sided_p(delta_raw / se_raw) : 0.0;

  for (int k = 1; k < ls.rank; ++k)
    out.beta.emplace_back(M.col_names[ls.kept[k]], ls.beta(ls.kept[k]));
  for (int j : ls.dropped) out.dropped_collinear.push_back(M.col_names[j]);

  out.n_obs_used = M.rows();
  out.n_drivers_used = M.n_drivers;
  out.n_singletons_dropped = singles;
  out.n_rows_dropped_missing = M.n_rows_dropped_missing;
  out.n_rows_dropped_nonpair = M.n_rows_dropped_nonpair;
  out.iterations = absorb.iterations;
  out.final_grad_norm = absorb.final_max_rel_proj;
  out.converged = true;

  if (opts.keep_residuals) out.residuals = resid;
  if (opts.keep_fixed_effects)
    out.fixed_effects = recover_fixed_effects(original, ls.beta);
  return out;
}

}  // namespace pfe
