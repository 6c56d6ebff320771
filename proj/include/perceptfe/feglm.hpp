#pragma once

#include <vector>

#include <Eigen/Dense>

#include "perceptfe/design.hpp"
#include "perceptfe/model.hpp"
#include "perceptfe/parallel.hpp"
#include "perceptfe/types.hpp"

namespace pfe {

inline constexpr double kFeglmDevTol = 1e-8;
inline constexpr int kFeglmMaxIter = 200;

// Logit likelihood with driver intercepts, estimated by iteratively
// reweighted least squares: each iteration re-demeans the working response
// and design within drivers under the current weights and solves the
// weighted least squares. Drivers whose outcomes are all 0 or all 1 have a
// divergent intercept and are dropped up front. delta is in log-odds;
// variance is the driver-clustered sandwich on the working model.
FitResult fit_feglm_logit(const std::vector<DriverPanel>& panels, const ModelSpec& spec,
                          const FitOptions& opts = {}, Exec exec = Exec::Parallel);

FitResult fit_feglm_design(const DesignMatrix& M, const ModelSpec& spec,
                           const FitOptions& opts = {}, Exec exec = Exec::Parallel);

// Joint log-likelihood of the logit model with explicit driver intercepts,
// plus analytic gradients; the analytic gradient is checked against finite
// differences in the test suite.
double feglm_loglik(const DesignMatrix& M, const Eigen::VectorXd& beta,
                    const Eigen::VectorXd& alpha, Eigen::VectorXd* grad_beta = nullptr,
                    Eigen::VectorXd* grad_alpha = nullptr);

}  // namespace pfe
