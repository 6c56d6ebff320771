#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perceptfe/dates.hpp"

namespace pfe {

enum class State : uint8_t { AZ, CO, TX };

enum class Race : uint8_t { White, Hispanic, Black, AsianPacific, Other, Unknown };

inline constexpr int kNumRaces = 6;

const char* to_string(State s);
const char* to_string(Race r);
std::optional<State> state_from_string(std::string_view s);
std::optional<Race> race_from_string(std::string_view s);

// Set of race categories, as a bitmask over Race values.
class RaceSet {
public:
  void add(Race r) { bits_ |= mask(r); }
  bool has(Race r) const { return bits_ & mask(r); }
  int count_non_unknown() const;
  bool equals_pair(Race a, Race b) const { return bits_ == (mask(a) | mask(b)); }
  bool operator==(const RaceSet&) const = default;

private:
  static uint8_t mask(Race r) { return static_cast<uint8_t>(1u << static_cast<int>(r)); }
  uint8_t bits_ = 0;
};

// One police encounter after ingest normalization. Optional fields carry an
// explicit missing state; rows are never dropped at ingest for missing
// covariates (model fitting decides listwise deletion per control set).
struct StopRecord {
  State state = State::AZ;
  std::string stop_id;
  CivilDate date;
  std::optional<int> hour;                  // 0..23
  std::optional<std::string> county;
  std::optional<std::string> officer_id;
  Race perceived_race = Race::Unknown;
  bool searched = false;
  std::optional<bool> arrested;             // absent for TX
  std::optional<double> duration_minutes;   // AZ only
  std::vector<std::string> link_fields;     // normalized; "" marks a missing component

  bool operator==(const StopRecord&) const = default;
};

// Stops grouped by linked person. Stops are kept sorted by (date, stop_id).
struct DriverPanel {
  std::string driver_id;
  bool linkable = true;
  std::vector<StopRecord> stops;

  int n_stops() const { return static_cast<int>(stops.size()); }
  RaceSet perceived_races() const;
  void sort_stops();

  bool operator==(const DriverPanel&) const = default;
};

}  // namespace pfe
