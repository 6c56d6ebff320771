#pragma once

#include <cstdint>
#include <vector>

#include "perceptfe/design.hpp"
#include "perceptfe/parallel.hpp"

namespace pfe {

inline constexpr double kProjTol = 1e-10;     // relative to original column norm
inline constexpr int kProjMaxIter = 10000;

struct AbsorbStats {
  int iterations = 0;
  double final_max_rel_proj = 0.0;
};

// Sweeps group-mean subtraction over the given dimensions until every
// column is orthogonal to every dimension's indicator space, relative to
// the column's original norm. One dimension converges in a single exact
// pass. Optional row weights give weighted group means (used by the IRLS
// re-demeaning step). Columns are demeaned independently, so results are
// identical for any thread count.
//
// Throws NumericalError (carrying the last residual) at the iteration cap.
AbsorbStats demean_columns(std::vector<double*> cols, long n,
                           const std::vector<const int32_t*>& dims,
                           const std::vector<int32_t>& dim_levels,
                           const double* weights = nullptr,
                           double tol = kProjTol, int max_iter = kProjMaxIter,
                           Exec exec = Exec::Parallel);

// Demeans y and every column of X within the absorbed dimensions of M.
AbsorbStats absorb_fixed_effects(DesignMatrix& M, double tol = kProjTol,
                                 int max_iter = kProjMaxIter, Exec exec = Exec::Parallel);

// Recovers per-level effects of the absorbed dimensions for the model
// y = X beta + effects + e, by alternating extraction on y - X beta.
// Effects of dimensions after the first are normalized to mean zero.
std::vector<std::vector<double>> recover_fixed_effects(const DesignMatrix& original,
                                                       const Eigen::VectorXd& beta,
                                                       double tol = kProjTol,
                                                       int max_iter = kProjMaxIter);

}  // namespace pfe
