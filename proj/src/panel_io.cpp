#include "perceptfe/panel_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "perceptfe/csv.hpp"
#include "perceptfe/errors.hpp"
#include "perceptfe/text.hpp"

namespace pfe {

namespace {

constexpr int kMaxLinkKeys = 4;

const std::vector<std::string> kStopsHeader = {
    "state",      "stop_id",  "date",     "hour",           "county",
    "officer_id", "perceived_race", "searched", "arrested", "duration_minutes",
    "key1",       "key2",     "key3",     "key4"};

const std::vector<std::string> kPanelsHeader = {
    "driver_id", "linkable",       "state",    "stop_id",  "date",
    "hour",      "county",         "officer_id", "perceived_race", "searched",
    "arrested",  "duration_minutes"};

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string opt_bool(const std::optional<bool>& b) {
  if (!b) return "";
  return *b ? "1" : "0";
}

void require_header(const std::vector<std::string>& got,
                    const std::vector<std::string>& want, const char* what) {
  if (got != want) throw SchemaError(std::string("not a canonical ") + what +
                                     " file: unexpected header row");
}

std::vector<std::string> stop_fields(const StopRecord& r) {
  std::vector<std::string> f;
  f.reserve(kStopsHeader.size());
  f.push_back(to_string(r.state));
  f.push_back(r.stop_id);
  f.push_back(r.date.to_string());
  f.push_back(r.hour ? std::to_string(*r.hour) : "");
  f.push_back(r.county.value_or(""));
  f.push_back(r.officer_id.value_or(""));
  f.push_back(to_string(r.perceived_race));
  f.push_back(r.searched ? "1" : "0");
  f.push_back(opt_bool(r.arrested));
  f.push_back(r.duration_minutes ? format_double(*r.duration_minutes) : "");
  return f;
}

// Parses the shared stop columns from fields[base..]; throws on bad values.
StopRecord parse_stop(const std::vector<std::string>& f, size_t base, long line) {
  auto bad = [&](const std::string& what) {
    throw SchemaError("line " + std::to_string(line) + ": " + what);
  };
  StopRecord r;
  auto st = state_from_string(f[base]);
  if (!st) bad("bad state '" + f[base] + "'");
  r.state = *st;
  r.stop_id = f[base + 1];
  auto d = parse_date(f[base + 2]);
  if (!d) bad("bad date '" + f[base + 2] + "'");
  r.date = *d;
  if (!f[base + 3].empty()) {
    int h = 0;
    auto [p, ec] = std::from_chars(f[base + 3].data(), f[base + 3].data() + f[base + 3].size(), h);
    if (ec != std::errc{} || h < 0 || h > 23) bad("bad hour '" + f[base + 3] + "'");
    r.hour = h;
  }
  if (!f[base + 4].empty()) r.county = f[base + 4];
  if (!f[base + 5].empty()) r.officer_id = f[base + 5];
  auto race = race_from_string(f[base + 6]);
  if (!race) bad("bad perceived_race '" + f[base + 6] + "'");
  r.perceived_race = *race;
  if (f[base + 7] != "0" && f[base + 7] != "1") bad("bad searched '" + f[base + 7] + "'");
  r.searched = f[base + 7] == "1";
  if (!f[base + 8].empty()) {
    if (f[base + 8] != "0" && f[base + 8] != "1") bad("bad arrested '" + f[base + 8] + "'");
    r.arrested = f[base + 8] == "1";
  }
  if (!f[base + 9].empty()) {
    try {
      r.duration_minutes = std::stod(f[base + 9]);
    } catch (...) {
      bad("bad duration_minutes '" + f[base + 9] + "'");
    }
  }
  return r;
}

}  // namespace

void write_stops(std::ostream& out, const std::vector<StopRecord>& records) {
  write_csv_row(out, kStopsHeader);
  for (const auto& r : records) {
    auto f = stop_fields(r);
    for (int k = 0; k < kMaxLinkKeys; ++k)
      f.push_back(k < static_cast<int>(r.link_fields.size()) ? r.link_fields[k] : "");
    write_csv_row(out, f);
  }
}

std::vector<StopRecord> read_stops(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw SchemaError("empty stops file");
  require_header(fields, kStopsHeader, "stops");
  std::vector<StopRecord> out;
  while (reader.next(fields)) {
    if (fields.size() != kStopsHeader.size())
      throw SchemaError("line " + std::to_string(reader.line()) + ": wrong field count");
    StopRecord r = parse_stop(fields, 0, reader.line());
    // Trailing empty key columns are trimmed so the key arity matches the
    // state's definition.
    int last = kMaxLinkKeys;
    while (last > 0 && fields[10 + last - 1].empty()) --last;
    for (int k = 0; k < last; ++k) r.link_fields.push_back(fields[10 + k]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_panels(std::ostream& out, const std::vector<DriverPanel>& panels) {
  write_csv_row(out, kPanelsHeader);
  for (const auto& p : panels) {
    for (const auto& s : p.stops) {
      std::vector<std::string> f;
      f.reserve(kPanelsHeader.size());
      f.push_back(p.driver_id);
      f.push_back(p.linkable ? "1" : "0");
      auto rest = stop_fields(s);
      f.insert(f.end(), rest.begin(), rest.end());
      write_csv_row(out, f);
    }
  }
}

std::vector<DriverPanel> read_panels(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw SchemaError("empty panels file");
  require_header(fields, kPanelsHeader, "panels");

  std::unordered_map<std::string, size_t> index;
  std::vector<DriverPanel> panels;
  while (reader.next(fields)) {
    if (fields.size() != kPanelsHeader.size())
      throw SchemaError("line " + std::to_string(reader.line()) + ": wrong field count");
    const std::string& id = fields[0];
    if (id.empty()) throw SchemaError("line " + std::to_string(reader.line()) + ": empty driver_id");
    bool linkable = fields[1] == "1";
    auto [it, inserted] = index.try_emplace(id, panels.size());
    if (inserted) {
      DriverPanel p;
      p.driver_id = id;
      p.linkable = linkable;
      panels.push_back(std::move(p));
    }
    panels[it->second].stops.push_back(parse_stop(fields, 2, reader.line()));
  }
  for (auto& p : panels) p.sort_stops();
  std::sort(panels.begin(), panels.end(),
            [](const DriverPanel& a, const DriverPanel& b) { return a.driver_id < b.driver_id; });
  return panels;
}

void write_stops_file(const std::string& path, const std::vector<StopRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_stops(out, records);
}

std::vector<StopRecord> read_stops_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_stops(in);
}

void write_panels_file(const std::string& path, const std::vector<DriverPanel>& panels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_panels(out, panels);
}

std::vector<DriverPanel> read_panels_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_panels(in);
}

}  // namespace pfe
