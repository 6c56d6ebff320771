#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "perceptfe/types.hpp"

namespace pfe {

// Toggles for the final cohort rule. The default keeps a driver only when
// the full set of perceived categories is exactly {white, hispanic}; the
// superset rule keeps any driver perceived as both, third categories allowed.
struct CohortRules {
  bool exact_pair = true;
  // Under the exact-pair rule, a stop with unknown race excludes the panel.
  bool unknown_excludes = true;
};

// Drivers with at least two stops.
std::vector<DriverPanel> filter_multiply_stopped(const std::vector<DriverPanel>& panels);

// Drivers whose stops carry at least two distinct non-unknown categories.
std::vector<DriverPanel> filter_inconsistent(const std::vector<DriverPanel>& panels);

// Drivers perceived as both white and hispanic, per the rules above.
std::vector<DriverPanel> filter_white_hispanic(const std::vector<DriverPanel>& panels,
                                               const CohortRules& rules = {});

struct LevelStats {
  long drivers = 0;
  long stops = 0;
};

// One column of the descriptive table (a state, or the pooled total).
struct CohortColumn {
  LevelStats full, multi, inconsistent, pair_wh;
  long pair_stops_hispanic = 0, pair_searched_hispanic = 0;
  long pair_stops_white = 0, pair_searched_white = 0;

  double search_rate_hispanic() const {
    return pair_stops_hispanic ? double(pair_searched_hispanic) / pair_stops_hispanic : 0.0;
  }
  double search_rate_white() const {
    return pair_stops_white ? double(pair_searched_white) / pair_stops_white : 0.0;
  }
};

struct CohortStats {
  std::map<State, CohortColumn> by_state;
  CohortColumn overall;
};

// Counts drivers/stops at each nesting level and the analysis-sample search
// rates by perceived race. The four collections must be the successive
// filter outputs over the same data.
CohortStats descriptive_stats(const std::vector<DriverPanel>& full,
                              const std::vector<DriverPanel>& multi,
                              const std::vector<DriverPanel>& inconsistent,
                              const std::vector<DriverPanel>& pair_wh);

// Fixed-width text table over states present plus an overall column.
std::string render_cohort_table(const CohortStats& stats);

}  // namespace pfe
