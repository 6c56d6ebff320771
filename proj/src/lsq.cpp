#include "perceptfe/lsq.hpp"

#include <cmath>

namespace pfe {

LsqResult lsq_rank_revealing(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             double rel_tol, Exec exec) {
  const long n = A.rows();
  const long p = A.cols();
  LsqResult out;
  out.beta = Eigen::VectorXd::Zero(p);
  if (n == 0 || p == 0) return out;

  Eigen::MatrixXd W = A;
  Eigen::VectorXd c = b;

  double scale = 0.0;
  for (long j = 0; j < p; ++j) scale = std::max(scale, W.col(j).norm());
  const double threshold = rel_tol * scale;

  // Householder vectors for accepted columns, stored in the lower part of W.
  long r = 0;
  for (long j = 0; j < p; ++j) {
    const long m = n - r;
    if (m <= 0) {
      out.dropped.push_back(static_cast<int>(j));
      continue;
    }
    double pivot = W.col(j).tail(m).norm();
    if (pivot <= threshold) {
      out.dropped.push_back(static_cast<int>(j));
      continue;
    }

    // Build the reflector for rows r..n-1 of column j.
    Eigen::VectorXd v = W.col(j).tail(m);
    double alpha = v(0) >= 0 ? -pivot : pivot;
    v(0) -= alpha;
    double vnorm = v.norm();
    bool reflect = vnorm > 0.0;
    if (reflect) v /= vnorm;

    W(r, j) = alpha;
    if (m > 1) W.col(j).tail(m - 1).setZero();

    if (reflect) {
      const long rest = p - j - 1;
      if (exec == Exec::Parallel && rest > 0 && m * rest > 16384) {
#pragma omp parallel for schedule(static)
        for (long k = j + 1; k < p; ++k) {
          double dot = v.dot(W.col(k).tail(m));
          W.col(k).tail(m) -= 2.0 * dot * v;
        }
      } else {
        for (long k = j + 1; k < p; ++k) {
          double dot = v.dot(W.col(k).tail(m));
          W.col(k).tail(m) -= 2.0 * dot * v;
        }
      }
      double dotc = v.dot(c.tail(m));
      c.tail(m) -= 2.0 * dotc * v;
    }

    out.kept.push_back(static_cast<int>(j));
    ++r;
  }
  out.rank = static_cast<int>(r);

  // Back substitution on the kept upper triangle.
  if (r > 0) {
    out.R.resize(r, r);
    for (long jj = 0; jj < r; ++jj)
      for (long ii = 0; ii < r; ++ii)
        out.R(ii, jj) = ii <= jj ? W(ii, out.kept[jj]) : 0.0;
    Eigen::VectorXd z = c.head(r);
    for (long i = r - 1; i >= 0; --i) {
      double s = z(i);
      for (long k = i + 1; k < r; ++k) s -= out.R(i, k) * z(k);
      z(i) = s / out.R(i, i);
    }
    for (long i = 0; i < r; ++i) out.beta(out.kept[i]) = z(i);
  }
  return out;
}

Eigen::MatrixXd xtx_inverse_from_r(const Eigen::MatrixXd& R) {
  const long r = R.rows();
  Eigen::MatrixXd Rinv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(r, r));
  return Rinv * Rinv.transpose();
}

}  // namespace pfe
