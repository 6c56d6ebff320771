#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "perceptfe/parallel.hpp"

namespace pfe {

// Cluster-robust sandwich variance over the kept design columns:
//   V = c * (X'X)^-1 (sum_g X_g' e_g e_g' X_g) (X'X)^-1,
//   c = [G/(G-1)] * [(N-1)/(N-k_effective)].
// X is the (demeaned, possibly sqrt-weight-scaled) design restricted to
// kept columns; R is its upper-triangular QR factor. k_effective counts
// retained columns plus absorbed fixed-effect degrees of freedom.
//
// Per-cluster scores are computed in parallel and reduced serially in
// cluster order, so the result is bitwise identical for any thread count.
// Throws InferenceError when fewer than two clusters are present or the
// residual degrees of freedom are nonpositive.
Eigen::MatrixXd cluster_robust_vcov(const Eigen::MatrixXd& X, const Eigen::VectorXd& resid,
                                    const std::vector<int32_t>& cluster, int32_t n_clusters,
                                    double k_effective, const Eigen::MatrixXd& R,
                                    Exec exec = Exec::Parallel);

// Degrees of freedom absorbed by the fixed-effect dimensions: the level
// counts, minus one redundancy per extra dimension, minus the extra
// redundancies detected between the first two dimensions via connected
// components of their bipartite level graph.
double absorbed_dof(const std::vector<std::vector<int32_t>>& fe_levels,
                    const std::vector<int32_t>& fe_n_levels);

// Same, for use inside the cluster-robust correction: a dimension whose
// levels are nested within clusters contributes no degrees of freedom
// there (the within-cluster dependence its demeaning induces is already
// captured by the cluster sums; counting it again would inflate the
// variance by ~sqrt(2) on two-stop clusters).
double absorbed_dof_clustered(const std::vector<std::vector<int32_t>>& fe_levels,
                              const std::vector<int32_t>& fe_n_levels,
                              const std::vector<int32_t>& cluster);

}  // namespace pfe
