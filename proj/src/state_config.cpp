#include "perceptfe/state_config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "perceptfe/errors.hpp"
#include "perceptfe/text.hpp"

namespace pfe {

using nlohmann::json;

namespace {

std::string get_column(const json& cols, const char* field) {
  if (!cols.contains(field))
    throw SchemaError(std::string("state config: columns.") + field +
                      " must be present (use null or \"\" to mark it absent)");
  const auto& v = cols.at(field);
  if (v.is_null()) return "";
  if (!v.is_string()) throw SchemaError(std::string("state config: columns.") + field +
                                        " must be a string or null");
  return v.get<std::string>();
}

std::optional<CivilDate> get_date(const json& j, const char* field) {
  if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
  auto d = parse_date(j.at(field).get<std::string>(), DateFormat::YMD);
  if (!d) throw SchemaError(std::string("state config: bad date in ") + field);
  return d;
}

}  // namespace

Race StateConfig::normalize_race(std::string_view raw) const {
  std::string key = to_lower(trim(raw));
  if (auto canonical = race_from_string(key)) return *canonical;
  auto it = race_labels.find(key);
  if (it != race_labels.end()) return it->second;
  return Race::Unknown;
}

StateConfig StateConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("state config: invalid JSON: ") + e.what());
  }

  StateConfig c;
  auto st = state_from_string(j.value("state", ""));
  if (!st) throw SchemaError("state config: state must be one of az, co, tx");
  c.state = *st;

  std::string delim = j.value("delimiter", ",");
  if (delim.size() != 1) throw SchemaError("state config: delimiter must be one character");
  c.delimiter = delim[0];

  if (!j.contains("columns")) throw SchemaError("state config: missing columns");
  const json& cols = j.at("columns");
  c.col_stop_id = get_column(cols, "stop_id");
  c.col_date = get_column(cols, "date");
  c.col_hour = get_column(cols, "hour");
  c.col_county = get_column(cols, "county");
  c.col_officer = get_column(cols, "officer_id");
  c.col_race = get_column(cols, "perceived_race");
  c.col_searched = get_column(cols, "searched");
  c.col_arrested = get_column(cols, "arrested");
  c.col_duration = get_column(cols, "duration_minutes");

  if (c.col_stop_id.empty() || c.col_date.empty() || c.col_race.empty() ||
      c.col_searched.empty())
    throw SchemaError("state config: stop_id, date, perceived_race and searched columns are required");
  if (c.state == State::TX && !c.col_arrested.empty())
    throw SchemaError("state config: arrested must be marked absent for tx");
  if (c.state != State::AZ && !c.col_duration.empty())
    throw SchemaError("state config: duration_minutes is only recorded for az");

  if (j.contains("race_labels")) {
    for (const auto& [k, v] : j.at("race_labels").items()) {
      auto r = race_from_string(v.get<std::string>());
      if (!r)
        throw SchemaError("state config: race_labels value '" + v.get<std::string>() +
                          "' is not a canonical category");
      c.race_labels[to_lower(trim(k))] = *r;
    }
  }

  std::string fmt = j.value("date_format", "ymd");
  if (fmt == "ymd") {
    c.date_format = DateFormat::YMD;
  } else if (fmt == "mdy") {
    c.date_format = DateFormat::MDY;
  } else {
    throw SchemaError("state config: date_format must be ymd or mdy");
  }
  c.date_min = get_date(j, "date_min");
  c.date_max = get_date(j, "date_max");

  if (!j.contains("link_keys") || !j.at("link_keys").is_array() || j.at("link_keys").empty())
    throw SchemaError("state config: link_keys must be a non-empty array of column names");
  for (const auto& k : j.at("link_keys")) c.link_keys.push_back(k.get<std::string>());

  return c;
}

StateConfig StateConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open state config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

}  // namespace pfe
