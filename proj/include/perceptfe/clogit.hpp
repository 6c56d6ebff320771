#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "perceptfe/design.hpp"
#include "perceptfe/model.hpp"
#include "perceptfe/parallel.hpp"
#include "perceptfe/types.hpp"

namespace pfe {

inline constexpr double kClogitGradTol = 1e-10;
inline constexpr int kClogitMaxIter = 100;
inline constexpr double kSeparationBound = 20.0;  // log-odds

// Strata with covariate rows and binary outcomes, the conditional-logit
// working representation.
struct Stratum {
  Eigen::MatrixXd x;        // n_i rows, p columns
  std::vector<uint8_t> y;   // 0/1 per row
};

// Exact conditional log-likelihood over strata: per stratum i with k_i
// successes among n_i rows, the denominator sums exp(sum of eta) over all
// k_i-subsets, computed by the standard subset-sum recursion (n_i <= 10
// keeps this tiny). Optionally accumulates the analytic gradient and the
// observed information (negative Hessian). Per-stratum terms are reduced
// in a fixed block order, so results are identical for any thread count.
double clogit_loglik(const std::vector<Stratum>& strata, const Eigen::VectorXd& theta,
                     Eigen::VectorXd* grad = nullptr, Eigen::MatrixXd* info = nullptr,
                     Exec exec = Exec::Parallel);

struct ClogitFit {
  Eigen::VectorXd theta;
  Eigen::MatrixXd info;      // observed information at the optimum
  double loglik = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
};

// Newton iterations to gradient norm < tol. Throws SeparationError when a
// coefficient passes kSeparationBound in absolute value, NumericalError at
// the iteration cap, EmptySampleError when no strata are given.
ClogitFit clogit_newton(const std::vector<Stratum>& strata,
                        const std::vector<std::string>& names,
                        double tol = kClogitGradTol, int max_iter = kClogitMaxIter,
                        Exec exec = Exec::Parallel);

// Fits on the driver strata of the design built from panels. Strata with
// zero or all successes are uninformative and dropped; covariates without
// within-stratum variation are dropped before optimization.
FitResult fit_conditional_logit(const std::vector<DriverPanel>& panels,
                                const ModelSpec& spec, const FitOptions& opts = {},
                                Exec exec = Exec::Parallel);

FitResult fit_clogit_design(const DesignMatrix& M, const ModelSpec& spec,
                            const FitOptions& opts = {}, Exec exec = Exec::Parallel);

}  // namespace pfe
