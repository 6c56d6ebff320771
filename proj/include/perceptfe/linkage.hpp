#pragma once

#include <string>
#include <vector>

#include "perceptfe/state_config.hpp"
#include "perceptfe/types.hpp"

namespace pfe {

struct LinkageReport {
  long n_stops = 0;            // input records
  long n_linkable = 0;         // records with a complete key tuple
  long n_drivers = 0;          // panels emitted (after overmatch removal)
  double pct_multiply_stopped = 0.0;  // % of drivers with >= 2 stops
  long n_removed_overmatch = 0;       // drivers removed for > 10 stops
};

// Groups stops by identical composite key. Records missing any key component
// become singleton panels flagged unlinkable. driver_id is a content hash of
// (state, key tuple), so panel identity is independent of input order; panels
// are returned sorted by driver_id and each panel's stops by (date, stop_id).
std::vector<DriverPanel> link_drivers(const std::vector<StopRecord>& records);

// Removes panels with more than `max_stops` stops entirely (likely mismatched
// identities). Returns the number of panels removed.
std::pair<std::vector<DriverPanel>, long> remove_overmatched(std::vector<DriverPanel> panels,
                                                             int max_stops = 10);

// link_drivers + remove_overmatched, with the combined report.
std::pair<std::vector<DriverPanel>, LinkageReport> link_pipeline(
    const std::vector<StopRecord>& records);

}  // namespace pfe
