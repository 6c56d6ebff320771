#pragma once

#include <string>
#include <vector>

#include "perceptfe/parallel.hpp"
#include "perceptfe/state_config.hpp"
#include "perceptfe/types.hpp"

namespace pfe {

struct RejectedRow {
  long row_number = 0;  // file line where the record starts (header is line 1)
  std::string reason;
};

struct LoadResult {
  std::vector<StopRecord> records;    // input order preserved
  std::vector<RejectedRow> rejections;
};

// Parses a delimiter-separated file into StopRecords under the given state
// config. Race labels are normalized (unmapped strings become unknown, never
// dropped); link fields are key-normalized; rows outside the configured date
// range or with unparseable required fields become rejection entries.
// Every input row maps to exactly one record or one rejection.
//
// Throws SchemaError when a configured column is missing from the header.
LoadResult load_stops(const std::string& path, const StateConfig& config,
                      Exec exec = Exec::Parallel);

// Same, reading from an in-memory buffer (tests).
LoadResult load_stops_text(const std::string& text, const StateConfig& config,
                           Exec exec = Exec::Parallel);

struct FilterReport {
  long n_input = 0;
  long n_kept = 0;
  long n_removed_tx_pre2016 = 0;
  long n_removed_no_link_fields = 0;
};

// State-validity rules applied after load: Texas rows before 2016-01-01 are
// removed (recording in that period is unreliable), and rows carrying no
// link-key information at all are removed. Rows with a partial key survive
// here and become unlinkable singletons at the linkage stage.
std::pair<std::vector<StopRecord>, FilterReport> apply_validity_filters(
    std::vector<StopRecord> records);

}  // namespace pfe
