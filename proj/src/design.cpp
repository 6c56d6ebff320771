#include "perceptfe/design.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "perceptfe/errors.hpp"

namespace pfe {

namespace {

struct UsedRow {
  int32_t panel = 0;
  int32_t stop = 0;
  double y = 0.0;
  double treatment = 0.0;
  double duration = 0.0;
  int county = -1;    // index into sorted county labels
  int officer = -1;   // index into sorted officer labels
  int year = 0, quarter = 0, weekday = 0, hbin = 0;
};

// Sorted-unique label index; reference level is the first label.
template <typename T>
class LevelIndex {
public:
  void insert(const T& v) { values_.insert(v); }
  void freeze() {
    sorted_.assign(values_.begin(), values_.end());
  }
  int index_of(const T& v) const {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), v);
    return static_cast<int>(it - sorted_.begin());
  }
  const std::vector<T>& levels() const { return sorted_; }
  int size() const { return static_cast<int>(sorted_.size()); }

private:
  std::set<T> values_;
  std::vector<T> sorted_;
};

}  // namespace

DesignMatrix build_design(const std::vector<DriverPanel>& panels, const ModelSpec& spec) {
  spec.validate();

  const bool want_loctime = spec.has(kControlLocationTime);
  const bool want_officer = spec.has(kControlOfficer);
  const bool want_duration = spec.has(kControlDuration);

  for (const auto& p : panels) {
    for (const auto& s : p.stops) {
      if (want_duration && s.state != State::AZ)
        throw SpecificationError("duration control requires az rows only (duration is "
                                 "recorded only in az)");
      if (spec.outcome == Outcome::Arrested && s.state == State::TX)
        throw SpecificationError("arrested outcome cannot be fit with tx rows present "
                                 "(tx records no arrest data)");
    }
  }

  DesignMatrix M;
  std::vector<UsedRow> rows;
  LevelIndex<std::string> counties, officers;
  LevelIndex<int> years, quarters, weekdays, hbins;

  // Pass 1: row usability and level collection over usable rows only.
  for (size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& p = panels[pi];
    for (size_t si = 0; si < p.stops.size(); ++si) {
      const auto& s = p.stops[si];
      if (s.perceived_race != Race::White && s.perceived_race != Race::Hispanic) {
        ++M.n_rows_dropped_nonpair;
        continue;
      }
      UsedRow row;
      row.panel = static_cast<int32_t>(pi);
      row.stop = static_cast<int32_t>(si);
      row.treatment = s.perceived_race == Race::Hispanic ? 1.0 : 0.0;
      if (spec.outcome == Outcome::Searched) {
        row.y = s.searched ? 1.0 : 0.0;
      } else {
        if (!s.arrested) {
          ++M.n_rows_dropped_missing;
          continue;
        }
        row.y = *s.arrested ? 1.0 : 0.0;
      }
      if (want_loctime && (!s.county || !s.hour)) {
        ++M.n_rows_dropped_missing;
        continue;
      }
      if (want_officer && !s.officer_id) {
        ++M.n_rows_dropped_missing;
        continue;
      }
      if (want_duration && !s.duration_minutes) {
        ++M.n_rows_dropped_missing;
        continue;
      }
      if (want_loctime) {
        row.county = 0;  // resolved after freeze
        row.year = s.date.year;
        row.quarter = s.date.quarter();
        row.weekday = s.date.weekday();
        row.hbin = hour_bin(*s.hour);
        counties.insert(*s.county);
        years.insert(row.year);
        quarters.insert(row.quarter);
        weekdays.insert(row.weekday);
        hbins.insert(row.hbin);
      }
      if (want_officer) officers.insert(*s.officer_id);
      if (want_duration) row.duration = *s.duration_minutes;
      rows.push_back(std::move(row));
    }
  }

  counties.freeze();
  officers.freeze();
  years.freeze();
  quarters.freeze();
  weekdays.freeze();
  hbins.freeze();

  const long n = static_cast<long>(rows.size());

  // Resolve string levels and compact per-row ids.
  std::map<int32_t, int32_t> driver_map;  // panel index -> compact driver id
  for (long i = 0; i < n; ++i) {
    const auto& s = panels[rows[i].panel].stops[rows[i].stop];
    if (want_loctime) rows[i].county = counties.index_of(*s.county);
    if (want_officer) rows[i].officer = officers.index_of(*s.officer_id);
    driver_map.try_emplace(rows[i].panel, 0);
  }
  {
    int32_t next = 0;
    for (auto& [panel, id] : driver_map) id = next++;
  }
  M.n_drivers = static_cast<int32_t>(driver_map.size());
  M.driver.resize(n);
  for (long i = 0; i < n; ++i) M.driver[i] = driver_map.at(rows[i].panel);

  // Column layout: treatment, then dummy batteries, then duration.
  const bool county_dummies = want_loctime && !spec.absorbs(FeDim::County);
  const bool officer_dummies = want_officer && !spec.absorbs(FeDim::Officer);
  long p_cols = 1;
  if (county_dummies) p_cols += std::max(0, counties.size() - 1);
  if (want_loctime)
    p_cols += std::max(0, years.size() - 1) + std::max(0, quarters.size() - 1) +
              std::max(0, weekdays.size() - 1) + std::max(0, hbins.size() - 1);
  if (officer_dummies) p_cols += std::max(0, officers.size() - 1);
  if (want_duration) p_cols += 1;

  M.y.resize(n);
  M.X = Eigen::MatrixXd::Zero(n, p_cols);
  M.col_names.reserve(p_cols);
  M.col_names.push_back("perceived_hispanic");

  struct DummyBlock {
    long col0;
    int n_levels;
    const int UsedRow::* field;
  };
  std::vector<DummyBlock> blocks;
  long next_col = 1;
  auto add_block = [&](int n_levels, const int UsedRow::* field, auto name_fn) {
    if (n_levels <= 1) return;  // single level carries no contrast
    blocks.push_back({next_col, n_levels, field});
    for (int l = 1; l < n_levels; ++l) M.col_names.push_back(name_fn(l));
    next_col += n_levels - 1;
  };

  if (county_dummies)
    add_block(counties.size(), &UsedRow::county,
              [&](int l) { return "county=" + counties.levels()[l]; });
  if (want_loctime) {
    add_block(years.size(), &UsedRow::year,
              [&](int l) { return "year=" + std::to_string(years.levels()[l]); });
    add_block(quarters.size(), &UsedRow::quarter,
              [&](int l) { return "quarter=" + std::to_string(quarters.levels()[l]); });
    add_block(weekdays.size(), &UsedRow::weekday,
              [&](int l) { return "weekday=" + std::to_string(weekdays.levels()[l]); });
    add_block(hbins.size(), &UsedRow::hbin,
              [&](int l) { return "hour_bin=" + std::to_string(hbins.levels()[l]); });
  }
  if (officer_dummies)
    add_block(officers.size(), &UsedRow::officer,
              [&](int l) { return "officer=" + officers.levels()[l]; });
  long duration_col = -1;
  if (want_duration) {
    duration_col = next_col++;
    M.col_names.push_back("duration_minutes");
  }

  // Integer-valued fields were stored raw; re-index through the frozen maps.
  for (long i = 0; i < n; ++i) {
    if (want_loctime) {
      rows[i].year = years.index_of(rows[i].year);
      rows[i].quarter = quarters.index_of(rows[i].quarter);
      rows[i].weekday = weekdays.index_of(rows[i].weekday);
      rows[i].hbin = hbins.index_of(rows[i].hbin);
    }
  }

  for (long i = 0; i < n; ++i) {
    M.y(i) = rows[i].y;
    M.X(i, 0) = rows[i].treatment;
    for (const auto& b : blocks) {
      int level = rows[i].*(b.field);
      if (level > 0) M.X(i, b.col0 + level - 1) = 1.0;
    }
    if (duration_col >= 0) M.X(i, duration_col) = rows[i].duration;
  }

  // Absorbed dimensions.
  for (FeDim d : spec.fe_dims) {
    std::vector<int32_t> levels(n);
    int32_t n_levels = 0;
    switch (d) {
      case FeDim::Driver:
        for (long i = 0; i < n; ++i) levels[i] = M.driver[i];
        n_levels = M.n_drivers;
        break;
      case FeDim::Officer:
        for (long i = 0; i < n; ++i) levels[i] = rows[i].officer;
        n_levels = officers.size();
        break;
      case FeDim::County:
        for (long i = 0; i < n; ++i) levels[i] = rows[i].county;
        n_levels = counties.size();
        break;
    }
    M.fe_levels.push_back(std::move(levels));
    M.fe_n_levels.push_back(n_levels);
    M.fe_dim_names.push_back(to_string(d));
  }

  // Cluster assignment.
  M.cluster.resize(n);
  switch (spec.cluster_dim) {
    case FeDim::Driver:
      M.cluster = M.driver;
      M.n_clusters = M.n_drivers;
      break;
    case FeDim::Officer:
      if (!want_officer)
        throw SpecificationError("clustering on officer requires the officer control");
      for (long i = 0; i < n; ++i) M.cluster[i] = rows[i].officer;
      M.n_clusters = officers.size();
      break;
    case FeDim::County:
      if (!want_loctime)
        throw SpecificationError("clustering on county requires the location/time controls");
      for (long i = 0; i < n; ++i) M.cluster[i] = rows[i].county;
      M.n_clusters = counties.size();
      break;
  }

  M.provenance.reserve(n);
  for (long i = 0; i < n; ++i) M.provenance.emplace_back(rows[i].panel, rows[i].stop);
  return M;
}

namespace {

std::pair<std::vector<int32_t>, int32_t> recompact(const std::vector<int32_t>& levels,
                                                   int32_t n_levels,
                                                   const std::vector<long>& keep_rows) {
  std::vector<int32_t> remap(n_levels, -1);
  for (long i : keep_rows)
    if (remap[levels[i]] < 0) remap[levels[i]] = 0;
  int32_t next = 0;
  for (int32_t g = 0; g < n_levels; ++g)
    if (remap[g] == 0) remap[g] = next++;
  std::vector<int32_t> out;
  out.reserve(keep_rows.size());
  for (long i : keep_rows) out.push_back(remap[levels[i]]);
  return {std::move(out), next};
}

}  // namespace

DesignMatrix design_subset(const DesignMatrix& M, const std::vector<long>& keep_rows) {
  DesignMatrix S;
  const long m = static_cast<long>(keep_rows.size());
  S.y.resize(m);
  S.X.resize(m, M.X.cols());
  for (long k = 0; k < m; ++k) {
    S.y(k) = M.y(keep_rows[k]);
    S.X.row(k) = M.X.row(keep_rows[k]);
  }
  S.col_names = M.col_names;
  S.fe_dim_names = M.fe_dim_names;
  for (size_t d = 0; d < M.fe_levels.size(); ++d) {
    auto [levels, count] = recompact(M.fe_levels[d], M.fe_n_levels[d], keep_rows);
    S.fe_levels.push_back(std::move(levels));
    S.fe_n_levels.push_back(count);
  }
  {
    auto [cluster, count] = recompact(M.cluster, M.n_clusters, keep_rows);
    S.cluster = std::move(cluster);
    S.n_clusters = count;
  }
  {
    auto [driver, count] = recompact(M.driver, M.n_drivers, keep_rows);
    S.driver = std::move(driver);
    S.n_drivers = count;
  }
  S.n_rows_dropped_missing = M.n_rows_dropped_missing;
  S.n_rows_dropped_nonpair = M.n_rows_dropped_nonpair;
  for (long i : keep_rows) S.provenance.push_back(M.provenance[i]);
  return S;
}

}  // namespace pfe
