#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "perceptfe/model.hpp"
#include "perceptfe/types.hpp"

namespace pfe {

// Numeric design built from panels under a ModelSpec. Column 0 of X is
// always the treatment indicator (perceived hispanic); the remaining
// columns are dummy-coded controls (one reference level dropped per
// categorical) and continuous controls.
struct DesignMatrix {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> col_names;

  // Absorbed dimensions: compact level id per row, per dimension.
  std::vector<std::vector<int32_t>> fe_levels;
  std::vector<int32_t> fe_n_levels;
  std::vector<std::string> fe_dim_names;

  std::vector<int32_t> cluster;  // per row
  int32_t n_clusters = 0;

  // Driver index per row (equals fe dim 0 for absorbed-driver estimators;
  // kept separately so conditional logit can stratify without absorption).
  std::vector<int32_t> driver;
  int32_t n_drivers = 0;

  long n_rows_dropped_missing = 0;
  long n_rows_dropped_nonpair = 0;

  // (panel index, stop index) per used row.
  std::vector<std::pair<int32_t, int32_t>> provenance;

  long rows() const { return y.size(); }
  long cols() const { return X.cols(); }
};

// Builds the design: treatment = 1 iff perceived hispanic; rows whose
// perceived race is neither white nor hispanic are excluded; rows with a
// missing value in any active column are excluded and counted; hour bins
// are [0,3), [3,6), ..., [21,24).
//
// Throws SpecificationError if duration is requested with non-AZ rows
// present, or outcome is arrested with TX rows present.
DesignMatrix build_design(const std::vector<DriverPanel>& panels, const ModelSpec& spec);

// 0..7 bin index for an hour of day.
inline int hour_bin(int hour) { return hour / 3; }

// Row subset of a design, with every level vector (fe dims, cluster,
// driver) recompacted to the surviving levels in ascending old-id order.
DesignMatrix design_subset(const DesignMatrix& M, const std::vector<long>& keep_rows);

}  // namespace pfe
