#pragma once

#include <vector>

#include "perceptfe/design.hpp"
#include "perceptfe/model.hpp"
#include "perceptfe/parallel.hpp"
#include "perceptfe/types.hpp"

namespace pfe {

// Linear probability model with absorbed fixed effects and driver-clustered
// inference. delta is reported in percentage points.
FitResult fit_linear_fe(const std::vector<DriverPanel>& panels, const ModelSpec& spec,
                        const FitOptions& opts = {}, Exec exec = Exec::Parallel);

// Same, starting from an already-built design (tests and the IRLS loop
// enter here). Drops drivers contributing a single usable row, absorbs the
// fixed-effect dimensions, solves by rank-revealing least squares, and
// applies the cluster-robust sandwich.
FitResult fit_linear_design(const DesignMatrix& M, const ModelSpec& spec,
                            const FitOptions& opts = {}, Exec exec = Exec::Parallel);

}  // namespace pfe
