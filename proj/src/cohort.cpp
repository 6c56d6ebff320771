#include "perceptfe/cohort.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace pfe {

namespace {

bool pair_rule(const DriverPanel& p, const CohortRules& rules) {
  RaceSet races = p.perceived_races();
  if (rules.exact_pair) {
    if (rules.unknown_excludes && races.has(Race::Unknown)) return false;
    RaceSet non_unknown;
    for (const auto& s : p.stops)
      if (s.perceived_race != Race::Unknown) non_unknown.add(s.perceived_race);
    return non_unknown.equals_pair(Race::White, Race::Hispanic);
  }
  return races.has(Race::White) && races.has(Race::Hispanic);
}

void accumulate_level(LevelStats CohortColumn::* level, const std::vector<DriverPanel>& panels,
                      CohortStats& out) {
  for (const auto& p : panels) {
    State st = p.stops.empty() ? State::AZ : p.stops.front().state;
    CohortColumn& col = out.by_state[st];
    (col.*level).drivers += 1;
    (col.*level).stops += p.n_stops();
    (out.overall.*level).drivers += 1;
    (out.overall.*level).stops += p.n_stops();
  }
}

std::string with_commas(long v) {
  std::string digits = std::to_string(v);
  std::string out;
  int count = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (count && count % 3 == 0 && *it != '-') out.push_back(',');
    out.push_back(*it);
    ++count;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string pct(long num, long den) {
  if (den == 0) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * double(num) / double(den));
  return buf;
}

std::string rate_pct(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * r);
  return buf;
}

}  // namespace

std::vector<DriverPanel> filter_multiply_stopped(const std::vector<DriverPanel>& panels) {
  std::vector<DriverPanel> out;
  for (const auto& p : panels)
    if (p.n_stops() >= 2) out.push_back(p);
  return out;
}

std::vector<DriverPanel> filter_inconsistent(const std::vector<DriverPanel>& panels) {
  std::vector<DriverPanel> out;
  for (const auto& p : panels)
    if (p.perceived_races().count_non_unknown() >= 2) out.push_back(p);
  return out;
}

std::vector<DriverPanel> filter_white_hispanic(const std::vector<DriverPanel>& panels,
                                               const CohortRules& rules) {
  std::vector<DriverPanel> out;
  for (const auto& p : panels)
    if (pair_rule(p, rules)) out.push_back(p);
  return out;
}

CohortStats descriptive_stats(const std::vector<DriverPanel>& full,
                              const std::vector<DriverPanel>& multi,
                              const std::vector<DriverPanel>& inconsistent,
                              const std::vector<DriverPanel>& pair_wh) {
  CohortStats out;
  accumulate_level(&CohortColumn::full, full, out);
  accumulate_level(&CohortColumn::multi, multi, out);
  accumulate_level(&CohortColumn::inconsistent, inconsistent, out);
  accumulate_level(&CohortColumn::pair_wh, pair_wh, out);

  for (const auto& p : pair_wh) {
    State st = p.stops.empty() ? State::AZ : p.stops.front().state;
    CohortColumn& col = out.by_state[st];
    for (const auto& s : p.stops) {
      if (s.perceived_race == Race::Hispanic) {
        col.pair_stops_hispanic += 1;
        out.overall.pair_stops_hispanic += 1;
        if (s.searched) {
          col.pair_searched_hispanic += 1;
          out.overall.pair_searched_hispanic += 1;
        }
      } else if (s.perceived_race == Race::White) {
        col.pair_stops_white += 1;
        out.overall.pair_stops_white += 1;
        if (s.searched) {
          col.pair_searched_white += 1;
          out.overall.pair_searched_white += 1;
        }
      }
    }
  }
  return out;
}

std::string render_cohort_table(const CohortStats& stats) {
  std::vector<std::pair<std::string, const CohortColumn*>> cols;
  for (const auto& [st, col] : stats.by_state) cols.emplace_back(to_string(st), &col);
  cols.emplace_back("overall", &stats.overall);

  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  auto add_row = [&](const std::string& label, auto value_fn) {
    std::vector<std::string> vals;
    for (auto& [name, col] : cols) vals.push_back(value_fn(*col));
    rows.emplace_back(label, std::move(vals));
  };
  auto section = [&](const std::string& title) { rows.emplace_back(title, std::vector<std::string>{}); };

  section("all drivers");
  add_row("  drivers", [](const CohortColumn& c) { return with_commas(c.full.drivers); });
  add_row("  stops", [](const CohortColumn& c) { return with_commas(c.full.stops); });
  section("multiply-stopped drivers");
  add_row("  drivers", [](const CohortColumn& c) { return with_commas(c.multi.drivers); });
  add_row("  % of all drivers",
          [](const CohortColumn& c) { return pct(c.multi.drivers, c.full.drivers); });
  add_row("  stops", [](const CohortColumn& c) { return with_commas(c.multi.stops); });
  add_row("  % of all stops",
          [](const CohortColumn& c) { return pct(c.multi.stops, c.full.stops); });
  section("inconsistently-perceived drivers");
  add_row("  drivers", [](const CohortColumn& c) { return with_commas(c.inconsistent.drivers); });
  add_row("  % of multiply-stopped drivers",
          [](const CohortColumn& c) { return pct(c.inconsistent.drivers, c.multi.drivers); });
  add_row("  stops", [](const CohortColumn& c) { return with_commas(c.inconsistent.stops); });
  add_row("  % of multiply-stopped stops",
          [](const CohortColumn& c) { return pct(c.inconsistent.stops, c.multi.stops); });
  section("perceived both white and hispanic");
  add_row("  drivers", [](const CohortColumn& c) { return with_commas(c.pair_wh.drivers); });
  add_row("  % of inconsistently-perceived drivers",
          [](const CohortColumn& c) { return pct(c.pair_wh.drivers, c.inconsistent.drivers); });
  add_row("  stops", [](const CohortColumn& c) { return with_commas(c.pair_wh.stops); });
  add_row("  % of inconsistently-perceived stops",
          [](const CohortColumn& c) { return pct(c.pair_wh.stops, c.inconsistent.stops); });
  add_row("  search rate when perceived hispanic",
          [](const CohortColumn& c) { return rate_pct(c.search_rate_hispanic()); });
  add_row("  search rate when perceived white",
          [](const CohortColumn& c) { return rate_pct(c.search_rate_white()); });

  size_t label_w = 0;
  for (auto& [label, vals] : rows) label_w = std::max(label_w, label.size());
  std::vector<size_t> col_w(cols.size());
  for (size_t j = 0; j < cols.size(); ++j) {
    col_w[j] = cols[j].first.size();
    for (auto& [label, vals] : rows)
      if (!vals.empty()) col_w[j] = std::max(col_w[j], vals[j].size());
  }

  std::ostringstream out;
  out << std::string(label_w, ' ');
  for (size_t j = 0; j < cols.size(); ++j)
    out << "  " << std::string(col_w[j] - cols[j].first.size(), ' ') << cols[j].first;
  out << '\n';
  for (auto& [label, vals] : rows) {
    out << label;
    if (!vals.empty()) {
      out << std::string(label_w - label.size(), ' ');
      for (size_t j = 0; j < cols.size(); ++j)
        out << "  " << std::string(col_w[j] - vals[j].size(), ' ') << vals[j];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace pfe
