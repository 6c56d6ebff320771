#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "perceptfe/types.hpp"

namespace pfe {

// Canonical comma-separated formats tying the pipeline stages together.
// `link` and `simulate` both emit the panels format, which is the one
// input `describe`, `fit` and `report` read; estimator code never sees a
// different path for simulated versus ingested data.
//
// stops format (post-ingest, pre-linkage); empty field = missing:
//   state,stop_id,date,hour,county,officer_id,perceived_race,searched,
//   arrested,duration_minutes,key1,key2,key3,key4
//
// panels format (one row per stop, grouped by driver):
//   driver_id,linkable,state,stop_id,date,hour,county,officer_id,
//   perceived_race,searched,arrested,duration_minutes
//
// Booleans are 0/1, dates ISO YYYY-MM-DD, duration a shortest round-trip
// decimal. Readers validate the header verbatim.

void write_stops(std::ostream& out, const std::vector<StopRecord>& records);
std::vector<StopRecord> read_stops(std::istream& in);

void write_panels(std::ostream& out, const std::vector<DriverPanel>& panels);
std::vector<DriverPanel> read_panels(std::istream& in);

void write_stops_file(const std::string& path, const std::vector<StopRecord>& records);
std::vector<StopRecord> read_stops_file(const std::string& path);
void write_panels_file(const std::string& path, const std::vector<DriverPanel>& panels);
std::vector<DriverPanel> read_panels_file(const std::string& path);

}  // namespace pfe
