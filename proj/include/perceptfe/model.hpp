#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pfe {

enum class Outcome { Searched, Arrested };

enum class Estimator { LinearFE, FeglmLogit, ConditionalLogit };

// Composable control batteries.
enum Controls : unsigned {
  kControlsNone = 0,
  kControlLocationTime = 1u << 0,  // county; year, quarter, weekday, 3-hour bin
  kControlOfficer = 1u << 1,
  kControlDuration = 1u << 2,      // continuous; Arizona only
};

// Categorical dimensions that can be absorbed instead of dummy-coded.
enum class FeDim { Driver, Officer, County };

struct ModelSpec {
  Outcome outcome = Outcome::Searched;
  unsigned controls = kControlsNone;
  Estimator estimator = Estimator::LinearFE;

  // Absorbed dimensions, in order. Driver must come first for linear_fe and
  // feglm_logit (feglm absorbs only driver). Must be empty for
  // conditional_logit, which stratifies on driver instead. When the officer
  // control is requested and Officer appears here, officer enters as an
  // absorbed effect rather than dummy columns.
  std::vector<FeDim> fe_dims = {FeDim::Driver};

  FeDim cluster_dim = FeDim::Driver;
  // conditional_logit reports inverse observed information by default;
  // this switches it to the cluster-robust sandwich over strata.
  bool clogit_robust = false;

  // Validates internal consistency; throws SpecificationError.
  void validate() const;

  bool has(Controls c) const { return controls & c; }
  bool absorbs(FeDim d) const;
};

struct FitResult {
  // Percentage points for linear_fe; log-odds for the logit families.
  double delta_hat = 0.0;
  double se_delta = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double p_value = 1.0;
  std::string scale;  // "percentage points" | "log-odds"

  std::vector<std::pair<std::string, double>> beta;  // retained control coefficients
  std::vector<std::string> dropped_collinear;

  long n_obs_used = 0;
  long n_drivers_used = 0;
  long n_singletons_dropped = 0;   // drivers contributing one usable row (linear)
  long n_strata_dropped = 0;       // all-0/all-1 strata (conditional logit)
  long n_separated_dropped = 0;    // all-0/all-1 drivers (feglm)
  long n_rows_dropped_missing = 0;
  long n_rows_dropped_nonpair = 0;  // perceived race outside {white, hispanic}

  int iterations = 0;
  double final_grad_norm = 0.0;
  bool converged = true;

  // Populated when requested through FitOptions.
  std::optional<Eigen::VectorXd> residuals;
  std::optional<std::vector<std::vector<double>>> fixed_effects;  // per absorbed dim
};

struct FitOptions {
  bool keep_residuals = false;
  bool keep_fixed_effects = false;
};

const char* to_string(Outcome o);
const char* to_string(Estimator e);
const char* to_string(FeDim d);

}  // namespace pfe
