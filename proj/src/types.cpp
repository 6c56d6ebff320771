#include "perceptfe/types.hpp"

#include <algorithm>
#include <bit>

#include "perceptfe/text.hpp"

namespace pfe {

const char* to_string(State s) {
  switch (s) {
    case State::AZ: return "az";
    case State::CO: return "co";
    case State::TX: return "tx";
  }
  return "?";
}

const char* to_string(Race r) {
  switch (r) {
    case Race::White: return "white";
    case Race::Hispanic: return "hispanic";
    case Race::Black: return "black";
    case Race::AsianPacific: return "asian_pacific";
    case Race::Other: return "other";
    case Race::Unknown: return "unknown";
  }
  return "?";
}

std::optional<State> state_from_string(std::string_view s) {
  std::string v = to_lower(trim(s));
  if (v == "az") return State::AZ;
  if (v == "co") return State::CO;
  if (v == "tx") return State::TX;
  return std::nullopt;
}

std::optional<Race> race_from_string(std::string_view s) {
  std::string v = to_lower(trim(s));
  if (v == "white") return Race::White;
  if (v == "hispanic") return Race::Hispanic;
  if (v == "black") return Race::Black;
  if (v == "asian_pacific") return Race::AsianPacific;
  if (v == "other") return Race::Other;
  if (v == "unknown") return Race::Unknown;
  return std::nullopt;
}

int RaceSet::count_non_unknown() const {
  uint8_t b = bits_ & static_cast<uint8_t>(~mask(Race::Unknown));
  return std::popcount(b);
}

RaceSet DriverPanel::perceived_races() const {
  RaceSet s;
  for (const auto& stop : stops) s.add(stop.perceived_race);
  return s;
}

void DriverPanel::sort_stops() {
  std::sort(stops.begin(), stops.end(), [](const StopRecord& a, const StopRecord& b) {
    if (a.date != b.date) return a.date < b.date;
    return a.stop_id < b.stop_id;
  });
}

}  // namespace pfe
