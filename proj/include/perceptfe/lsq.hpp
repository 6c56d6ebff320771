#pragma once

#include <vector>

#include <Eigen/Dense>

#include "perceptfe/parallel.hpp"

namespace pfe {

inline constexpr double kPivotTol = 1e-10;  // relative to the largest column norm

struct LsqResult {
  Eigen::VectorXd beta;       // full length; dropped columns get 0
  std::vector<int> kept;      // column indices retained, in input order
  std::vector<int> dropped;   // column indices dropped as collinear, in input order
  Eigen::MatrixXd R;          // rank x rank upper-triangular factor over kept columns
  int rank = 0;
};

// Least squares via Householder QR processed strictly left to right: a
// column whose pivot magnitude falls below rel_tol times the largest
// original column norm is dropped as collinear, so the drop order is the
// column order. The trailing-column reflector applications are the
// data-parallel kernel; results are identical for any thread count.
LsqResult lsq_rank_revealing(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             double rel_tol = kPivotTol, Exec exec = Exec::Parallel);

// Solves R' z = e1, R w = z to give the first row/column of (A'A)^{-1} on
// the kept columns; helper for variance of the leading coefficient.
Eigen::MatrixXd xtx_inverse_from_r(const Eigen::MatrixXd& R);

}  // namespace pfe
