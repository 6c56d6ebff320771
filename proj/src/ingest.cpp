#include "perceptfe/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "perceptfe/csv.hpp"
#include "perceptfe/errors.hpp"
#include "perceptfe/text.hpp"

namespace pfe {

namespace {

constexpr CivilDate kTxCutoff{2016, 1, 1};

struct ColumnIndex {
  int stop_id = -1, date = -1, hour = -1, county = -1, officer = -1;
  int race = -1, searched = -1, arrested = -1, duration = -1;
  std::vector<int> link_keys;
  size_t n_columns = 0;
};

int find_column(const std::vector<std::string>& header, const std::string& name,
                bool required) {
  if (name.empty()) return -1;
  for (size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == name) return static_cast<int>(i);
  if (required) throw SchemaError("input is missing required column: " + name);
  return -1;
}

ColumnIndex index_columns(const std::vector<std::string>& header, const StateConfig& c) {
  ColumnIndex ix;
  ix.n_columns = header.size();
  ix.stop_id = find_column(header, c.col_stop_id, true);
  ix.date = find_column(header, c.col_date, true);
  ix.race = find_column(header, c.col_race, true);
  ix.searched = find_column(header, c.col_searched, true);
  ix.hour = find_column(header, c.col_hour, !c.col_hour.empty());
  ix.county = find_column(header, c.col_county, !c.col_county.empty());
  ix.officer = find_column(header, c.col_officer, !c.col_officer.empty());
  ix.arrested = find_column(header, c.col_arrested, !c.col_arrested.empty());
  ix.duration = find_column(header, c.col_duration, !c.col_duration.empty());
  for (const auto& k : c.link_keys) ix.link_keys.push_back(find_column(header, k, true));
  return ix;
}

std::optional<bool> parse_bool(std::string_view raw) {
  std::string v = to_lower(trim(raw));
  if (v == "true" || v == "t" || v == "1" || v == "yes" || v == "y") return true;
  if (v == "false" || v == "f" || v == "0" || v == "no" || v == "n") return false;
  return std::nullopt;
}

std::optional<int> parse_hour(std::string_view raw) {
  std::string v = trim(raw);
  int h = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), h);
  if (ec != std::errc{} || p != v.data() + v.size() || h < 0 || h > 23) return std::nullopt;
  return h;
}

std::optional<double> parse_duration(std::string_view raw) {
  std::string v = trim(raw);
  if (v.empty()) return std::nullopt;
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size() || !(d >= 0.0)) return std::nullopt;
    return d;
  } catch (...) {
    return std::nullopt;
  }
}

// Converts one raw row. Returns a reason string on rejection.
std::optional<std::string> convert_row(const std::vector<std::string>& row,
                                       const ColumnIndex& ix, const StateConfig& c,
                                       StopRecord& out) {
  if (row.size() != ix.n_columns) return "column count mismatch";

  out.state = c.state;
  out.stop_id = trim(row[ix.stop_id]);
  if (out.stop_id.empty()) return "missing stop_id";

  auto date = parse_date(row[ix.date], c.date_format);
  if (!date) return "unparseable date: " + trim(row[ix.date]);
  out.date = *date;
  if (c.date_min && out.date < *c.date_min) return "outside configured date range";
  if (c.date_max && *c.date_max < out.date) return "outside configured date range";

  auto searched = parse_bool(row[ix.searched]);
  if (!searched) return "unparseable searched value: " + trim(row[ix.searched]);
  out.searched = *searched;

  out.perceived_race = c.normalize_race(row[ix.race]);
  out.hour = ix.hour >= 0 ? parse_hour(row[ix.hour]) : std::nullopt;
  if (ix.county >= 0 && !is_blank(row[ix.county]))
    out.county = normalize_key(row[ix.county]);
  if (ix.officer >= 0 && !is_blank(row[ix.officer]))
    out.officer_id = normalize_key(row[ix.officer]);
  out.arrested = ix.arrested >= 0 ? parse_bool(row[ix.arrested]) : std::nullopt;
  out.duration_minutes = ix.duration >= 0 ? parse_duration(row[ix.duration]) : std::nullopt;

  out.link_fields.clear();
  out.link_fields.reserve(ix.link_keys.size());
  for (int col : ix.link_keys) out.link_fields.push_back(normalize_key(row[col]));
  return std::nullopt;
}

LoadResult load_from_stream(std::istream& in, const StateConfig& config, Exec exec) {
  CsvReader reader(in, config.delimiter);
  std::vector<std::string> header;
  if (!reader.next(header)) throw SchemaError("input file is empty (no header row)");
  ColumnIndex ix = index_columns(header, config);

  std::vector<std::vector<std::string>> rows;
  std::vector<long> row_lines;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    rows.push_back(fields);
    row_lines.push_back(reader.line());
  }

  const long n = static_cast<long>(rows.size());
  std::vector<StopRecord> records(n);
  std::vector<std::optional<std::string>> reject_reason(n);

  // Conversion is independent per row; output order is fixed by row index,
  // so the result is identical for any thread count.
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
      reject_reason[i] = convert_row(rows[i], ix, config, records[i]);
  } else {
    for (long i = 0; i < n; ++i)
      reject_reason[i] = convert_row(rows[i], ix, config, records[i]);
  }

  LoadResult out;
  out.records.reserve(n);
  for (long i = 0; i < n; ++i) {
    if (reject_reason[i]) {
      out.rejections.push_back({row_lines[i], *reject_reason[i]});
    } else {
      out.records.push_back(std::move(records[i]));
    }
  }
  return out;
}

}  // namespace

LoadResult load_stops(const std::string& path, const StateConfig& config, Exec exec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open input file: " + path);
  return load_from_stream(in, config, exec);
}

LoadResult load_stops_text(const std::string& text, const StateConfig& config, Exec exec) {
  std::istringstream in(text);
  return load_from_stream(in, config, exec);
}

std::pair<std::vector<StopRecord>, FilterReport> apply_validity_filters(
    std::vector<StopRecord> records) {
  FilterReport report;
  report.n_input = static_cast<long>(records.size());
  std::vector<StopRecord> kept;
  kept.reserve(records.size());
  for (auto& r : records) {
    if (r.state == State::TX && r.date < kTxCutoff) {
      ++report.n_removed_tx_pre2016;
      continue;
    }
    bool any_key = false;
    for (const auto& f : r.link_fields)
      if (!f.empty()) any_key = true;
    if (!any_key) {
      ++report.n_removed_no_link_fields;
      continue;
    }
    kept.push_back(std::move(r));
  }
  report.n_kept = static_cast<long>(kept.size());
  return {std::move(kept), report};
}

}  // namespace pfe
