#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perceptfe/dates.hpp"
#include "perceptfe/types.hpp"

namespace pfe {

// Per-state ingest schema: column mapping from raw headers to StopRecord
// fields, race-label normalization, date-range filter, and the linkage key
// definition. Loaded from a JSON file shipped in configs/.
//
// Every StopRecord field must appear under "columns"; an empty or null value
// marks the field as absent in that state's data.
struct StateConfig {
  State state = State::AZ;
  char delimiter = ',';

  // Source column names; empty string = field absent for this state.
  std::string col_stop_id;
  std::string col_date;
  std::string col_hour;
  std::string col_county;
  std::string col_officer;
  std::string col_race;
  std::string col_searched;
  std::string col_arrested;
  std::string col_duration;

  // Keys are matched after trim + lowercase. Canonical category names
  // ("white", "hispanic", ...) are reserved and always map to themselves,
  // which makes normalization idempotent.
  std::map<std::string, Race> race_labels;

  DateFormat date_format = DateFormat::YMD;
  std::optional<CivilDate> date_min;
  std::optional<CivilDate> date_max;

  // Source columns forming the composite driver key, in order.
  std::vector<std::string> link_keys;

  Race normalize_race(std::string_view raw) const;

  static StateConfig from_json_text(const std::string& text);
  static StateConfig from_file(const std::string& path);
};

}  // namespace pfe
