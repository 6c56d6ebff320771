#include "perceptfe/demean.hpp"

#include <cmath>
#include <cstring>

#include "perceptfe/errors.hpp"

namespace pfe {

namespace {

// One group-mean-subtraction pass of a single column over a single
// dimension. `inv_weight[g]` is 1 / (group count) or 1 / (group weight sum).
void demean_pass(double* col, long n, const int32_t* levels, int32_t n_levels,
                 const double* weights, const double* inv_weight, double* sums) {
  std::memset(sums, 0, sizeof(double) * n_levels);
  if (weights) {
    for (long i = 0; i < n; ++i) sums[levels[i]] += weights[i] * col[i];
  } else {
    for (long i = 0; i < n; ++i) sums[levels[i]] += col[i];
  }
  for (int32_t g = 0; g < n_levels; ++g) sums[g] *= inv_weight[g];
  for (long i = 0; i < n; ++i) col[i] -= sums[levels[i]];
}

// Squared norm of the projection of a column onto a dimension's indicator
// span: sum over groups of (weighted group sum)^2 / (group weight).
double proj_sq(const double* col, long n, const int32_t* levels, int32_t n_levels,
               const double* weights, const double* inv_weight, double* sums) {
  std::memset(sums, 0, sizeof(double) * n_levels);
  if (weights) {
    for (long i = 0; i < n; ++i) sums[levels[i]] += weights[i] * col[i];
  } else {
    for (long i = 0; i < n; ++i) sums[levels[i]] += col[i];
  }
  double total = 0.0;
  for (int32_t g = 0; g < n_levels; ++g) total += sums[g] * sums[g] * inv_weight[g];
  return total;
}

}  // namespace

AbsorbStats demean_columns(std::vector<double*> cols, long n,
                           const std::vector<const int32_t*>& dims,
                           const std::vector<int32_t>& dim_levels,
                           const double* weights, double tol, int max_iter, Exec exec) {
  AbsorbStats stats;
  const int n_dims = static_cast<int>(dims.size());
  const int n_cols = static_cast<int>(cols.size());
  if (n_dims == 0 || n_cols == 0 || n == 0) return stats;

  int32_t max_levels = 0;
  std::vector<std::vector<double>> inv_weight(n_dims);
  for (int d = 0; d < n_dims; ++d) {
    max_levels = std::max(max_levels, dim_levels[d]);
    inv_weight[d].assign(dim_levels[d], 0.0);
    for (long i = 0; i < n; ++i)
      inv_weight[d][dims[d][i]] += weights ? weights[i] : 1.0;
    for (int32_t g = 0; g < dim_levels[d]; ++g)
      inv_weight[d][g] = inv_weight[d][g] > 0.0 ? 1.0 / inv_weight[d][g] : 0.0;
  }

  std::vector<double> orig_norm(n_cols);
  for (int c = 0; c < n_cols; ++c) {
    double s = 0.0;
    const double* col = cols[c];
    if (weights) {
      for (long i = 0; i < n; ++i) s += weights[i] * col[i] * col[i];
    } else {
      for (long i = 0; i < n; ++i) s += col[i] * col[i];
    }
    orig_norm[c] = std::sqrt(s);
  }

  std::vector<double> col_proj(n_cols, 0.0);
  for (int iter = 1; iter <= max_iter; ++iter) {
    if (exec == Exec::Parallel) {
#pragma omp parallel
      {
        std::vector<double> sums(max_levels);
#pragma omp for schedule(static)
        for (int c = 0; c < n_cols; ++c) {
          for (int d = 0; d < n_dims; ++d)
            demean_pass(cols[c], n, dims[d], dim_levels[d], weights,
                        inv_weight[d].data(), sums.data());
          double worst = 0.0;
          for (int d = 0; d < n_dims; ++d)
            worst = std::max(worst, proj_sq(cols[c], n, dims[d], dim_levels[d], weights,
                                            inv_weight[d].data(), sums.data()));
          col_proj[c] = std::sqrt(worst);
        }
      }
    } else {
      std::vector<double> sums(max_levels);
      for (int c = 0; c < n_cols; ++c) {
        for (int d = 0; d < n_dims; ++d)
          demean_pass(cols[c], n, dims[d], dim_levels[d], weights,
                      inv_weight[d].data(), sums.data());
        double worst = 0.0;
        for (int d = 0; d < n_dims; ++d)
          worst = std::max(worst, proj_sq(cols[c], n, dims[d], dim_levels[d], weights,
                                          inv_weight[d].data(), sums.data()));
        col_proj[c] = std::sqrt(worst);
      }
    }

    double max_rel = 0.0;
    for (int c = 0; c < n_cols; ++c) {
      double rel = orig_norm[c] > 0.0 ? col_proj[c] / orig_norm[c] : 0.0;
      max_rel = std::max(max_rel, rel);
    }
    stats.iterations = iter;
    stats.final_max_rel_proj = max_rel;
    if (max_rel <= tol) return stats;
  }
  throw NumericalError("fixed-effect absorption did not converge in " +
                           std::to_string(max_iter) + " iterations",
                       stats.final_max_rel_proj);
}

AbsorbStats absorb_fixed_effects(DesignMatrix& M, double tol, int max_iter, Exec exec) {
  std::vector<double*> cols;
  cols.push_back(M.y.data());
  for (long j = 0; j < M.X.cols(); ++j) cols.push_back(M.X.col(j).data());
  std::vector<const int32_t*> dims;
  for (const auto& lev : M.fe_levels) dims.push_back(lev.data());
  return demean_columns(std::move(cols), M.rows(), dims, M.fe_n_levels, nullptr, tol,
                        max_iter, exec);
}

std::vector<std::vector<double>> recover_fixed_effects(const DesignMatrix& M,
                                                       const Eigen::VectorXd& beta,
                                                       double tol, int max_iter) {
  const long n = M.rows();
  const int n_dims = static_cast<int>(M.fe_levels.size());
  Eigen::VectorXd resid = M.y - M.X * beta;
  std::vector<std::vector<double>> effects(n_dims);
  for (int d = 0; d < n_dims; ++d) effects[d].assign(M.fe_n_levels[d], 0.0);

  std::vector<std::vector<double>> inv_count(n_dims);
  for (int d = 0; d < n_dims; ++d) {
    inv_count[d].assign(M.fe_n_levels[d], 0.0);
    for (long i = 0; i < n; ++i) inv_count[d][M.fe_levels[d][i]] += 1.0;
    for (auto& v : inv_count[d]) v = v > 0.0 ? 1.0 / v : 0.0;
  }

  // Alternating extraction: repeatedly move group means of the residual
  // into each dimension's effects until the residual is orthogonal to all.
  for (int iter = 0; iter < max_iter; ++iter) {
    double shift = 0.0;
    for (int d = 0; d < n_dims; ++d) {
      std::vector<double> mean(M.fe_n_levels[d], 0.0);
      for (long i = 0; i < n; ++i) mean[M.fe_levels[d][i]] += resid(i);
      for (int32_t g = 0; g < M.fe_n_levels[d]; ++g) mean[g] *= inv_count[d][g];
      for (long i = 0; i < n; ++i) resid(i) -= mean[M.fe_levels[d][i]];
      for (int32_t g = 0; g < M.fe_n_levels[d]; ++g) {
        effects[d][g] += mean[g];
        shift = std::max(shift, std::abs(mean[g]));
      }
    }
    if (shift <= tol) break;
  }

  // Normalization: dimensions after the first are centered, their means
  // folded into the first dimension's effects.
  for (int d = 1; d < n_dims; ++d) {
    double m = 0.0;
    for (double v : effects[d]) m += v;
    m /= effects[d].empty() ? 1.0 : static_cast<double>(effects[d].size());
    for (double& v : effects[d]) v -= m;
    for (double& v : effects[0]) v += m;
  }
  return effects;
}

}  // namespace pfe
