#pragma once

// Small fixture builders shared across test suites.

#include <random>
#include <string>
#include <vector>

#include "perceptfe/types.hpp"

namespace pfe::testing {

inline StopRecord make_stop(State state, std::string stop_id, CivilDate date, Race race,
                            bool searched) {
  StopRecord s;
  s.state = state;
  s.stop_id = std::move(stop_id);
  s.date = date;
  s.perceived_race = race;
  s.searched = searched;
  return s;
}

inline DriverPanel make_panel(std::string id, std::vector<StopRecord> stops) {
  DriverPanel p;
  p.driver_id = std::move(id);
  p.stops = std::move(stops);
  p.sort_stops();
  return p;
}

struct RandomPanelOptions {
  int n_drivers = 20;
  int max_stops = 6;
  int min_stops = 1;
  double hispanic_prob = 0.5;
  double search_prob = 0.3;
  double arrest_prob = 0.15;
  int n_counties = 3;
  int n_officers = 5;
  State state = State::AZ;
  bool with_covariates = true;
  double missing_prob = 0.0;  // chance a covariate is missing
  double unknown_race_prob = 0.0;
};

// Random panels with covariates, for property tests. Deterministic given
// the generator state.
inline std::vector<DriverPanel> random_panels(std::mt19937_64& rng,
                                              const RandomPanelOptions& o = {}) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<DriverPanel> panels;
  for (int d = 0; d < o.n_drivers; ++d) {
    DriverPanel p;
    p.driver_id = "t" + std::to_string(d);
    int n = o.min_stops +
            static_cast<int>(unif(rng) * (o.max_stops - o.min_stops + 1));
    if (n > o.max_stops) n = o.max_stops;
    for (int s = 0; s < n; ++s) {
      StopRecord r;
      r.state = o.state;
      r.stop_id = p.driver_id + "_" + std::to_string(s);
      r.date = CivilDate{2016 + static_cast<int>(unif(rng) * 3),
                         1 + static_cast<int>(unif(rng) * 12),
                         1 + static_cast<int>(unif(rng) * 28)};
      double u = unif(rng);
      r.perceived_race = u < o.unknown_race_prob ? Race::Unknown
                         : unif(rng) < o.hispanic_prob ? Race::Hispanic
                                                       : Race::White;
      r.searched = unif(rng) < o.search_prob;
      if (o.state != State::TX) r.arrested = unif(rng) < o.arrest_prob;
      if (o.with_covariates) {
        if (unif(rng) >= o.missing_prob)
          r.hour = static_cast<int>(unif(rng) * 24);
        if (unif(rng) >= o.missing_prob)
          r.county = "k" + std::to_string(static_cast<int>(unif(rng) * o.n_counties));
        if (unif(rng) >= o.missing_prob)
          r.officer_id = "f" + std::to_string(static_cast<int>(unif(rng) * o.n_officers));
        if (o.state == State::AZ && unif(rng) >= o.missing_prob)
          r.duration_minutes = 1.0 + 30.0 * unif(rng);
      }
      p.stops.push_back(std::move(r));
    }
    p.sort_stops();
    panels.push_back(std::move(p));
  }
  return panels;
}

}  // namespace pfe::testing
