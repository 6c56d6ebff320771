#include "perceptfe/linkage.hpp"

#include <algorithm>
#include <unordered_map>

#include "perceptfe/hash.hpp"

namespace pfe {

namespace {

// Key tuples are joined with a unit separator so distinct tuples cannot
// collide textually; the state prefix keeps keys from comparing equal
// across states.
std::string composite_key(const StopRecord& r) {
  std::string key = to_string(r.state);
  for (const auto& f : r.link_fields) {
    key.push_back('\x1f');
    key.append(f);
  }
  return key;
}

bool key_complete(const StopRecord& r) {
  if (r.link_fields.empty()) return false;
  for (const auto& f : r.link_fields)
    if (f.empty()) return false;
  return true;
}

}  // namespace

std::vector<DriverPanel> link_drivers(const std::vector<StopRecord>& records) {
  std::unordered_map<std::string, DriverPanel> by_key;
  std::vector<DriverPanel> panels;

  for (const auto& r : records) {
    if (key_complete(r)) {
      std::string key = composite_key(r);
      auto [it, inserted] = by_key.try_emplace(key);
      if (inserted) {
        it->second.driver_id = content_id(key);
        it->second.linkable = true;
      }
      it->second.stops.push_back(r);
    } else {
      DriverPanel p;
      p.driver_id = content_id("unlinkable\x1f" + std::string(to_string(r.state)) +
                               '\x1f' + r.stop_id);
      p.linkable = false;
      p.stops.push_back(r);
      panels.push_back(std::move(p));
    }
  }

  panels.reserve(panels.size() + by_key.size());
  for (auto& [key, panel] : by_key) panels.push_back(std::move(panel));

  for (auto& p : panels) p.sort_stops();
  std::sort(panels.begin(), panels.end(),
            [](const DriverPanel& a, const DriverPanel& b) { return a.driver_id < b.driver_id; });
  return panels;
}

std::pair<std::vector<DriverPanel>, long> remove_overmatched(std::vector<DriverPanel> panels,
                                                             int max_stops) {
  long removed = 0;
  std::vector<DriverPanel> kept;
  kept.reserve(panels.size());
  for (auto& p : panels) {
    if (p.n_stops() > max_stops) {
      ++removed;
    } else {
      kept.push_back(std::move(p));
    }
  }
  return {std::move(kept), removed};
}

std::pair<std::vector<DriverPanel>, LinkageReport> link_pipeline(
    const std::vector<StopRecord>& records) {
  LinkageReport report;
  report.n_stops = static_cast<long>(records.size());
  for (const auto& r : records)
    if (key_complete(r)) ++report.n_linkable;

  auto panels = link_drivers(records);
  auto [kept, removed] = remove_overmatched(std::move(panels));
  report.n_removed_overmatch = removed;
  report.n_drivers = static_cast<long>(kept.size());

  long multi = 0;
  for (const auto& p : kept)
    if (p.n_stops() >= 2) ++multi;
  report.pct_multiply_stopped =
      report.n_drivers > 0 ? 100.0 * static_cast<double>(multi) / report.n_drivers : 0.0;
  return {std::move(kept), report};
}

}  // namespace pfe
