#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "perceptfe/cohort.hpp"
#include "support/builders.hpp"

using namespace pfe;
using pfe::testing::make_panel;
using pfe::testing::make_stop;

namespace {

DriverPanel panel_with_races(const std::string& id, std::vector<Race> races,
                             State st = State::CO) {
  std::vector<StopRecord> stops;
  for (size_t i = 0; i < races.size(); ++i)
    stops.push_back(make_stop(st, id + "_" + std::to_string(i),
                              {2014, 1, 1 + static_cast<int>(i)}, races[i], false));
  return make_panel(id, std::move(stops));
}

}  // namespace

TEST_CASE("filter_multiply_stopped keeps two or more stops") {
  auto singleton = panel_with_races("a", {Race::White});
  auto pair = panel_with_races("b", {Race::White, Race::White});
  auto out = filter_multiply_stopped({singleton, pair});
  REQUIRE(out.size() == 1);
  CHECK(out[0].driver_id == "b");
}

TEST_CASE("filter_inconsistent needs two distinct non-unknown categories") {
  auto consistent = panel_with_races("a", {Race::White, Race::White});
  auto flip = panel_with_races("b", {Race::White, Race::Hispanic, Race::White});
  auto unknown_only = panel_with_races("c", {Race::White, Race::Unknown});
  auto out = filter_inconsistent({consistent, flip, unknown_only});
  REQUIRE(out.size() == 1);
  CHECK(out[0].driver_id == "b");
}

TEST_CASE("filter_white_hispanic: exact-pair rule") {
  auto wh = panel_with_races("wh", {Race::White, Race::Hispanic});
  auto wb = panel_with_races("wb", {Race::White, Race::Black});
  auto whb = panel_with_races("whb", {Race::White, Race::Hispanic, Race::Black});
  auto whu = panel_with_races("whu", {Race::White, Race::Hispanic, Race::Unknown});

  auto out = filter_white_hispanic({wh, wb, whb, whu});
  REQUIRE(out.size() == 1);
  CHECK(out[0].driver_id == "wh");

  SUBCASE("unknown stops may be tolerated by toggle") {
    CohortRules rules;
    rules.unknown_excludes = false;
    auto tolerant = filter_white_hispanic({wh, wb, whb, whu}, rules);
    REQUIRE(tolerant.size() == 2);
    CHECK(tolerant[1].driver_id == "whu");
  }
  SUBCASE("superset rule keeps third categories") {
    CohortRules rules;
    rules.exact_pair = false;
    auto superset = filter_white_hispanic({wh, wb, whb, whu}, rules);
    REQUIRE(superset.size() == 3);  // wh, whb, whu
  }
}

TEST_CASE("filters are idempotent and the pair filter commutes past inconsistency") {
  std::mt19937_64 rng(5);
  pfe::testing::RandomPanelOptions opt;
  opt.n_drivers = 60;
  opt.unknown_race_prob = 0.05;
  auto panels = pfe::testing::random_panels(rng, opt);

  auto multi = filter_multiply_stopped(panels);
  CHECK(filter_multiply_stopped(multi) == multi);
  auto inc = filter_inconsistent(multi);
  CHECK(filter_inconsistent(inc) == inc);
  auto pair = filter_white_hispanic(inc);
  CHECK(filter_white_hispanic(pair) == pair);

  // The pair rule already implies inconsistency on multiply-stopped panels.
  CHECK(filter_white_hispanic(multi) == pair);
}

TEST_CASE("nesting monotonicity on random fixtures") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    pfe::testing::RandomPanelOptions opt;
    opt.n_drivers = 1 + static_cast<int>(rng() % 40);
    opt.unknown_race_prob = 0.1;
    auto panels = pfe::testing::random_panels(rng, opt);
    auto multi = filter_multiply_stopped(panels);
    auto inc = filter_inconsistent(multi);
    auto pair = filter_white_hispanic(inc);
    auto stats = descriptive_stats(panels, multi, inc, pair);

    const auto& c = stats.overall;
    CHECK(c.full.drivers >= c.multi.drivers);
    CHECK(c.multi.drivers >= c.inconsistent.drivers);
    CHECK(c.inconsistent.drivers >= c.pair_wh.drivers);
    CHECK(c.full.stops >= c.multi.stops);
    CHECK(c.multi.stops >= c.inconsistent.stops);
    CHECK(c.inconsistent.stops >= c.pair_wh.stops);
  }
}

TEST_CASE("descriptive_stats: hand-counted fixture") {
  // Driver 1 (AZ): white, hispanic; searched on the hispanic stop.
  auto d1 = make_panel("d1", {make_stop(State::AZ, "a1", {2014, 1, 1}, Race::White, false),
                              make_stop(State::AZ, "a2", {2014, 2, 1}, Race::Hispanic, true)});
  // Driver 2 (AZ): white, white - multiply stopped but consistent.
  auto d2 = make_panel("d2", {make_stop(State::AZ, "b1", {2014, 1, 1}, Race::White, false),
                              make_stop(State::AZ, "b2", {2014, 3, 1}, Race::White, true)});
  // Driver 3 (CO): single stop.
  auto d3 = make_panel("d3", {make_stop(State::CO, "c1", {2014, 1, 1}, Race::Hispanic, false)});

  std::vector<DriverPanel> all = {d1, d2, d3};
  auto multi = filter_multiply_stopped(all);
  auto inc = filter_inconsistent(multi);
  auto pair = filter_white_hispanic(inc);
  auto stats = descriptive_stats(all, multi, inc, pair);

  CHECK(stats.overall.full.drivers == 3);
  CHECK(stats.overall.full.stops == 5);
  CHECK(stats.overall.multi.drivers == 2);
  CHECK(stats.overall.multi.stops == 4);
  CHECK(stats.overall.inconsistent.drivers == 1);
  CHECK(stats.overall.pair_wh.drivers == 1);
  CHECK(stats.overall.pair_wh.stops == 2);
  CHECK(stats.overall.search_rate_hispanic() == 1.0);
  CHECK(stats.overall.search_rate_white() == 0.0);

  const auto& az = stats.by_state.at(State::AZ);
  CHECK(az.full.drivers == 2);
  CHECK(az.full.stops == 4);
  const auto& co = stats.by_state.at(State::CO);
  CHECK(co.full.drivers == 1);
  CHECK(co.pair_wh.drivers == 0);
}

TEST_CASE("rate identity: analysis-sample rates recompute from raw stops") {
  std::mt19937_64 rng(29);
  pfe::testing::RandomPanelOptions opt;
  opt.n_drivers = 80;
  auto panels = pfe::testing::random_panels(rng, opt);
  auto multi = filter_multiply_stopped(panels);
  auto inc = filter_inconsistent(multi);
  auto pair = filter_white_hispanic(inc);
  auto stats = descriptive_stats(panels, multi, inc, pair);

  long stops_h = 0, searched_h = 0;
  for (const auto& p : pair)
    for (const auto& s : p.stops)
      if (s.perceived_race == Race::Hispanic) {
        ++stops_h;
        if (s.searched) ++searched_h;
      }
  if (stops_h > 0)
    CHECK(stats.overall.search_rate_hispanic() ==
          doctest::Approx(double(searched_h) / stops_h).epsilon(1e-12));
}
