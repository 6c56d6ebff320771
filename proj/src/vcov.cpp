#include "perceptfe/vcov.hpp"

#include <numeric>

#include "perceptfe/errors.hpp"
#include "perceptfe/lsq.hpp"

namespace pfe {

Eigen::MatrixXd cluster_robust_vcov(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid,
                                    const std::vector<int32_t>& cluster, int32_t n_clusters,
                                    double k_effective, const Eigen::MatrixXd& R, Exec exec) {
  const long n = X.rows();
  const long r = X.cols();

  // CSR-style buckets in cluster-id order.
  std::vector<int32_t> counts(n_clusters, 0);
  for (long i = 0; i < n; ++i) counts[cluster[i]]++;
  std::vector<int32_t> offsets(n_clusters + 1, 0);
  for (int32_t g = 0; g < n_clusters; ++g) offsets[g + 1] = offsets[g] + counts[g];
  std::vector<int32_t> rows_by_cluster(n);
  {
    std::vector<int32_t> cursor(offsets.begin(), offsets.end() - 1);
    for (long i = 0; i < n; ++i) rows_by_cluster[cursor[cluster[i]]++] = static_cast<int32_t>(i);
  }

  long g_used = 0;
  for (int32_t g = 0; g < n_clusters; ++g)
    if (counts[g] > 0) ++g_used;
  if (g_used < 2)
    throw InferenceError("cluster-robust variance requires at least two clusters (got " +
                         std::to_string(g_used) + ")");
  if (n - k_effective <= 0.0)
    throw InferenceError("nonpositive residual degrees of freedom (n = " + std::to_string(n) +
                         ", k_effective = " + std::to_string(k_effective) + ")");

  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(r, n_clusters);
  auto score_of = [&](int32_t g) {
    for (int32_t idx = offsets[g]; idx < offsets[g + 1]; ++idx) {
      int32_t i = rows_by_cluster[idx];
      scores.col(g) += X.row(i).transpose() * resid(i);
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int32_t g = 0; g < n_clusters; ++g) score_of(g);
  } else {
    for (int32_t g = 0; g < n_clusters; ++g) score_of(g);
  }

  // Serial reduction in cluster order keeps the sum independent of the
  // parallel schedule above.
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(r, r);
  for (int32_t g = 0; g < n_clusters; ++g) {
    if (counts[g] == 0) continue;
    meat.noalias() += scores.col(g) * scores.col(g).transpose();
  }

  const double G = static_cast<double>(g_used);
  const double N = static_cast<double>(n);
  const double c = (G / (G - 1.0)) * ((N - 1.0) / (N - k_effective));

  Eigen::MatrixXd bread = xtx_inverse_from_r(R);
  Eigen::MatrixXd V = c * bread * meat * bread;
  return 0.5 * (V + V.transpose());
}

double absorbed_dof(const std::vector<std::vector<int32_t>>& fe_levels,
                    const std::vector<int32_t>& fe_n_levels) {
  const int d = static_cast<int>(fe_levels.size());
  if (d == 0) return 0.0;
  double dof = 0.0;
  for (int32_t L : fe_n_levels) dof += L;
  dof -= d - 1;
  if (d >= 2) {
    // Union-find over the bipartite graph linking dim-0 and dim-1 levels;
    // each extra connected component is one more redundant level.
    const int32_t n0 = fe_n_levels[0];
    const int32_t n1 = fe_n_levels[1];
    std::vector<int32_t> parent(n0 + n1);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<int32_t> rank(n0 + n1, 0);
    auto find = [&](int32_t x) {
      while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
      }
      return x;
    };
    auto unite = [&](int32_t a, int32_t b) {
      a = find(a);
      b = find(b);
      if (a == b) return;
      if (rank[a] < rank[b]) std::swap(a, b);
      parent[b] = a;
      if (rank[a] == rank[b]) ++rank[a];
    };
    const long n = static_cast<long>(fe_levels[0].size());
    for (long i = 0; i < n; ++i) unite(fe_levels[0][i], n0 + fe_levels[1][i]);

    std::vector<bool> seen(n0 + n1, false);
    long components = 0;
    for (long i = 0; i < n; ++i) {
      int32_t root = find(fe_levels[0][i]);
      if (!seen[root]) {
        seen[root] = true;
        ++components;
      }
    }
    if (components > 1) dof -= components - 1;
  }
  return dof;
}

double absorbed_dof_clustered(const std::vector<std::vector<int32_t>>& fe_levels,
                              const std::vector<int32_t>& fe_n_levels,
                              const std::vector<int32_t>& cluster) {
  double dof = absorbed_dof(fe_levels, fe_n_levels);
  const long n = fe_levels.empty() ? 0 : static_cast<long>(fe_levels[0].size());
  for (size_t d = 0; d < fe_levels.size(); ++d) {
    std::vector<int32_t> level_cluster(fe_n_levels[d], -1);
    bool nested = true;
    for (long i = 0; i < n && nested; ++i) {
      int32_t& c = level_cluster[fe_levels[d][i]];
      if (c < 0) {
        c = cluster[i];
      } else if (c != cluster[i]) {
        nested = false;
      }
    }
    if (nested) dof -= fe_n_levels[d];
  }
  return std::max(0.0, dof);
}

}  // namespace pfe
