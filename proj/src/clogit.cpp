#include "perceptfe/clogit.hpp"

#include <algorithm>
#include <cmath>

#include "perceptfe/demean.hpp"
#include "perceptfe/errors.hpp"
#include "perceptfe/lsq.hpp"
#include "perceptfe/stats.hpp"
#include "perceptfe/vcov.hpp"

namespace pfe {

namespace {

constexpr int kBlock = 64;  // strata per reduction block

// Log-likelihood, gradient and information contribution of one stratum via
// the subset-sum recursion over (item, subset size).
void stratum_terms(const Stratum& s, const Eigen::VectorXd& theta, double& ll,
                   Eigen::VectorXd* grad, Eigen::MatrixXd* info) {
  const int n = static_cast<int>(s.y.size());
  const int p = static_cast<int>(theta.size());
  int k = 0;
  for (uint8_t yi : s.y) k += yi;

  Eigen::VectorXd eta = s.x * theta;
  double shift = eta.maxCoeff();

  std::vector<double> f(k + 1, 0.0);
  f[0] = 1.0;
  std::vector<Eigen::VectorXd> g;
  std::vector<Eigen::MatrixXd> h;
  if (grad || info) g.assign(k + 1, Eigen::VectorXd::Zero(p));
  if (info) h.assign(k + 1, Eigen::MatrixXd::Zero(p, p));

  for (int j = 0; j < n; ++j) {
    const double w = std::exp(eta(j) - shift);
    const auto xj = s.x.row(j).transpose();
    const int top = std::min(j + 1, k);
    for (int m = top; m >= 1; --m) {
      if (info)
        h[m] += w * (h[m - 1] + g[m - 1] * xj.transpose() + xj * g[m - 1].transpose() +
                     f[m - 1] * (xj * xj.transpose()));
      if (grad || info) g[m] += w * (g[m - 1] + f[m - 1] * xj);
      f[m] += w * f[m - 1];
    }
  }

  if (!(f[k] > 0.0) || !std::isfinite(f[k]))
    throw NumericalError("conditional-logit denominator underflowed", f[k]);

  double success_eta = 0.0;
  Eigen::VectorXd success_x = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < n; ++j) {
    if (s.y[j]) {
      success_eta += eta(j);
      success_x += s.x.row(j).transpose();
    }
  }

  ll = success_eta - k * shift - std::log(f[k]);
  if (grad || info) {
    Eigen::VectorXd mean = g[k] / f[k];
    if (grad) *grad += success_x - mean;
    if (info) *info += h[k] / f[k] - mean * mean.transpose();
  }
}

}  // namespace

double clogit_loglik(const std::vector<Stratum>& strata, const Eigen::VectorXd& theta,
                     Eigen::VectorXd* grad, Eigen::MatrixXd* info, Exec exec) {
  const int p = static_cast<int>(theta.size());
  const long S = static_cast<long>(strata.size());
  if (grad) grad->setZero(p);
  if (info) info->setZero(p, p);

  const long n_blocks = (S + kBlock - 1) / kBlock;
  std::vector<double> block_ll(n_blocks, 0.0);
  std::vector<Eigen::VectorXd> block_grad;
  std::vector<Eigen::MatrixXd> block_info;
  if (grad) block_grad.assign(n_blocks, Eigen::VectorXd::Zero(p));
  if (info) block_info.assign(n_blocks, Eigen::MatrixXd::Zero(p, p));

  auto run_block = [&](long b) {
    const long lo = b * kBlock;
    const long hi = std::min(S, lo + kBlock);
    for (long i = lo; i < hi; ++i) {
      double ll = 0.0;
      stratum_terms(strata[i], theta, ll, grad ? &block_grad[b] : nullptr,
                    info ? &block_info[b] : nullptr);
      block_ll[b] += ll;
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    for (long b = 0; b < n_blocks; ++b) run_block(b);
  }

  double total = 0.0;
  for (long b = 0; b < n_blocks; ++b) {
    total += block_ll[b];
    if (grad) *grad += block_grad[b];
    if (info) *info += block_info[b];
  }
  return total;
}

ClogitFit clogit_newton(const std::vector<Stratum>& strata,
                        const std::vector<std::string>& names, double tol, int max_iter,
                        Exec exec) {
  if (strata.empty()) throw EmptySampleError("no informative strata");
  const int p = static_cast<int>(strata.front().x.cols());

  ClogitFit fit;
  fit.theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd grad(p);
  Eigen::MatrixXd info(p, p);
  double ll = clogit_loglik(strata, fit.theta, &grad, &info, exec);
  fit.grad_norm = grad.norm();
  if (fit.grad_norm < tol) {
    fit.loglik = ll;
    fit.info = info;
    return fit;
  }

  for (int iter = 1; iter <= max_iter; ++iter) {
    fit.iterations = iter;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite())
      throw NumericalError("conditional-logit Newton step is not finite", grad.norm());

    // Step halving keeps the concave objective increasing.
    double scale_step = 1.0;
    Eigen::VectorXd theta_new;
    double ll_new = ll;
    for (int h = 0; h < 40; ++h) {
      theta_new = fit.theta + scale_step * step;
      ll_new = clogit_loglik(strata, theta_new, nullptr, nullptr, exec);
      if (std::isfinite(ll_new) && ll_new >= ll - 1e-12) break;
      scale_step *= 0.5;
    }
    fit.theta = theta_new;
    ll = ll_new;

    for (int j = 0; j < p; ++j) {
      if (std::abs(fit.theta(j)) > kSeparationBound) {
        std::string name = j < static_cast<int>(names.size()) ? names[j]
                                                              : "column " + std::to_string(j);
        throw SeparationError(
            "separation detected: the conditional likelihood increases without bound "
            "along " + name,
            name);
      }
    }

    ll = clogit_loglik(strata, fit.theta, &grad, &info, exec);
    fit.grad_norm = grad.norm();
    if (fit.grad_norm < tol) {
      fit.loglik = ll;
      fit.info = info;
      return fit;
    }
  }
  throw NumericalError("conditional logit did not converge in " + std::to_string(max_iter) +
                           " iterations (|grad| = " + std::to_string(grad.norm()) + ")",
                       grad.norm());
}

FitResult fit_conditional_logit(const std::vector<DriverPanel>& panels,
                                const ModelSpec& spec, const FitOptions& opts, Exec exec) {
  DesignMatrix M = build_design(panels, spec);
  return fit_clogit_design(M, spec, opts, exec);
}

FitResult fit_clogit_design(const DesignMatrix& M, const ModelSpec& spec,
                            const FitOptions& opts, Exec exec) {
  if (M.rows() == 0) throw EmptySampleError("no usable rows for conditional_logit");

  // Bucket rows by stratum (driver).
  std::vector<std::vector<int32_t>> rows_of(M.n_drivers);
  for (long i = 0; i < M.rows(); ++i) rows_of[M.driver[i]].push_back(static_cast<int32_t>(i));

  long n_dropped_strata = 0;
  std::vector<long> used_rows;
  std::vector<int32_t> stratum_sizes;
  for (const auto& rows : rows_of) {
    if (rows.empty()) continue;
    int k = 0;
    for (int32_t i : rows) k += M.y(i) > 0.5 ? 1 : 0;
    if (k == 0 || k == static_cast<int>(rows.size())) {
      ++n_dropped_strata;
      continue;
    }
    for (int32_t i : rows) used_rows.push_back(i);
    stratum_sizes.push_back(static_cast<int32_t>(rows.size()));
  }
  if (stratum_sizes.empty())
    throw EmptySampleError("no informative strata (every driver has all-0 or all-1 outcomes)");

  // Covariates with no within-stratum variation are invisible to the
  // conditional likelihood; detect them by a rank check on the
  // within-stratum demeaned design restricted to used rows.
  const long n_used = static_cast<long>(used_rows.size());
  Eigen::MatrixXd Xd(n_used, M.X.cols());
  Eigen::VectorXd yd(n_used);
  std::vector<int32_t> stratum_of(n_used);
  {
    long r = 0;
    for (size_t s = 0; s < stratum_sizes.size(); ++s)
      for (int32_t j = 0; j < stratum_sizes[s]; ++j) stratum_of[r++] = static_cast<int32_t>(s);
  }
  for (long i = 0; i < n_used; ++i) {
    Xd.row(i) = M.X.row(used_rows[i]);
    yd(i) = M.y(used_rows[i]);
  }
  {
    Eigen::MatrixXd Xcheck = Xd;
    Eigen::VectorXd ycheck = yd;
    std::vector<double*> cols;
    for (long j = 0; j < Xcheck.cols(); ++j) cols.push_back(Xcheck.col(j).data());
    std::vector<const int32_t*> dims = {stratum_of.data()};
    std::vector<int32_t> dim_levels = {static_cast<int32_t>(stratum_sizes.size())};
    demean_columns(cols, n_used, dims, dim_levels, nullptr, kProjTol, kProjMaxIter, exec);
    LsqResult rank_check = lsq_rank_revealing(Xcheck, ycheck, kPivotTol, exec);
    if (rank_check.kept.empty() || rank_check.kept.front() != 0)
      throw IdentificationError("treatment has no within-stratum variation");

    FitResult out;
    for (int j : rank_check.dropped) out.dropped_collinear.push_back(M.col_names[j]);

    // Assemble strata over the kept columns.
    const int p = rank_check.rank;
    std::vector<Stratum> strata(stratum_sizes.size());
    std::vector<std::string> names;
    for (int k = 0; k < p; ++k) names.push_back(M.col_names[rank_check.kept[k]]);
    long r = 0;
    for (size_t s = 0; s < stratum_sizes.size(); ++s) {
      Stratum& st = strata[s];
      st.x.resize(stratum_sizes[s], p);
      st.y.resize(stratum_sizes[s]);
      for (int32_t j = 0; j < stratum_sizes[s]; ++j, ++r) {
        for (int k = 0; k < p; ++k) st.x(j, k) = Xd(r, rank_check.kept[k]);
        st.y[j] = yd(r) > 0.5 ? 1 : 0;
      }
    }

    ClogitFit fit = clogit_newton(strata, names, kClogitGradTol, kClogitMaxIter, exec);

    Eigen::MatrixXd V;
    Eigen::MatrixXd info_inv = fit.info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    if (spec.clogit_robust) {
      // Sandwich over strata: per-stratum scores at the optimum.
      Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
      for (const auto& st : strata) {
        std::vector<Stratum> one = {st};
        Eigen::VectorXd gi(p);
        clogit_loglik(one, fit.theta, &gi, nullptr, Exec::Serial);
        meat.noalias() += gi * gi.transpose();
      }
      const double G = static_cast<double>(strata.size());
      if (G < 2) throw InferenceError("cluster-robust variance requires at least two strata");
      V = (G / (G - 1.0)) * info_inv * meat * info_inv;
    } else {
      V = info_inv;
    }

    out.scale = "log-odds";
    out.delta_hat = fit.theta(0);
    out.se_delta = std::sqrt(std::max(0.0, V(0, 0)));
    out.ci_lo = out.delta_hat - kZ95 * out.se_delta;
    out.ci_hi = out.delta_hat + kZ95 * out.se_delta;
    out.p_value = out.se_delta > 0.0 ? two_sided_p(out.delta_hat / out.se_delta) : 0.0;
    for (int k = 1; k < p; ++k) out.beta.emplace_back(names[k], fit.theta(k));
    out.n_obs_used = n_used;
    out.n_drivers_used = static_cast<long>(strata.size());
    out.n_strata_dropped = n_dropped_strata;
    out.n_rows_dropped_missing = M.n_rows_dropped_missing;
    out.n_rows_dropped_nonpair = M.n_rows_dropped_nonpair;
    out.iterations = fit.iterations;
    out.final_grad_norm = fit.grad_norm;
    out.converged = true;
    if (opts.keep_residuals) {
      // Generalized residual: y minus the conditional success probability
      // is not defined per row here; expose the per-row outcome minus the
      // stratum mean instead.
      Eigen::VectorXd resid(n_used);
      long rr = 0;
      for (size_t s = 0; s < stratum_sizes.size(); ++s) {
        double mean = 0.0;
        for (int32_t j = 0; j < stratum_sizes[s]; ++j) mean += strata[s].y[j];
        mean /= stratum_sizes[s];
        for (int32_t j = 0; j < stratum_sizes[s]; ++j, ++rr) resid(rr) = strata[s].y[j] - mean;
      }
      out.residuals = resid;
    }
    return out;
  }
}

}  // namespace pfe
