#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "perceptfe/linkage.hpp"
#include "support/builders.hpp"

using namespace pfe;
using pfe::testing::make_stop;

namespace {

StopRecord co_stop(const std::string& id, const std::string& first, const std::string& last,
                   const std::string& dob, CivilDate date = {2014, 3, 1}) {
  auto s = make_stop(State::CO, id, date, Race::White, false);
  s.link_fields = {first, last, dob};
  return s;
}

}  // namespace

TEST_CASE("link_drivers: identical composite keys share one panel") {
  std::vector<StopRecord> records = {
      co_stop("1", "ana", "ruiz", "1990-01-01", {2014, 3, 1}),
      co_stop("2", "ana", "ruiz", "1990-01-01", {2013, 7, 9}),
      co_stop("3", "ben", "ruiz", "1990-01-01"),
  };
  auto panels = link_drivers(records);
  REQUIRE(panels.size() == 2);
  auto two = std::find_if(panels.begin(), panels.end(),
                          [](const DriverPanel& p) { return p.n_stops() == 2; });
  REQUIRE(two != panels.end());
  // Stops are time-ordered within the panel.
  CHECK(two->stops[0].stop_id == "2");
  CHECK(two->stops[1].stop_id == "1");
  CHECK(two->linkable);
}

TEST_CASE("link_drivers: any differing key component separates drivers") {
  std::vector<StopRecord> records;
  auto a = make_stop(State::AZ, "1", {2014, 1, 1}, Race::White, false);
  a.link_fields = {"john", "doe", "sedan", "2009"};
  auto b = a;
  b.stop_id = "2";
  b.link_fields = {"john", "doe", "sedan", "2011"};  // different vehicle year
  records = {a, b};
  auto panels = link_drivers(records);
  CHECK(panels.size() == 2);
}

TEST_CASE("link_drivers: missing key components make flagged singletons") {
  std::vector<StopRecord> records = {
      co_stop("1", "ana", "", "1990-01-01"),
      co_stop("2", "ana", "", "1990-01-01"),  // same partial key, still not linked
      co_stop("3", "ana", "ruiz", "1990-01-01"),
  };
  auto panels = link_drivers(records);
  REQUIRE(panels.size() == 3);
  int unlinkable = 0;
  for (const auto& p : panels)
    if (!p.linkable) {
      ++unlinkable;
      CHECK(p.n_stops() == 1);
    }
  CHECK(unlinkable == 2);
}

TEST_CASE("link_drivers: keys never merge across states") {
  auto co = co_stop("1", "ana", "ruiz", "x");
  auto tx = make_stop(State::TX, "2", {2016, 3, 1}, Race::White, false);
  tx.link_fields = {"ana", "ruiz", "x"};
  auto panels = link_drivers({co, tx});
  CHECK(panels.size() == 2);
}

TEST_CASE("remove_overmatched: boundary at ten stops") {
  std::vector<DriverPanel> panels(2);
  for (int i = 0; i < 11; ++i)
    panels[0].stops.push_back(co_stop(std::to_string(i), "a", "b", "c"));
  for (int i = 0; i < 10; ++i)
    panels[1].stops.push_back(co_stop("x" + std::to_string(i), "d", "e", "f"));
  auto [kept, removed] = remove_overmatched(std::move(panels));
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].n_stops() == 10);
  CHECK(removed == 1);
}

TEST_CASE("link_pipeline: partition conserves stops and reports key availability") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> person(0, 30);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<StopRecord> records;
  for (int i = 0; i < 200; ++i) {
    int pid = person(rng);
    auto s = co_stop("s" + std::to_string(i), "first" + std::to_string(pid),
                     "last" + std::to_string(pid), "dob" + std::to_string(pid),
                     {2014, 1 + static_cast<int>(u(rng) * 12), 1 + static_cast<int>(u(rng) * 28)});
    if (u(rng) < 0.1) s.link_fields[2] = "";  // some unlinkable
    records.push_back(s);
  }
  auto [panels, report] = link_pipeline(records);
  long total_stops = 0;
  for (const auto& p : panels) total_stops += p.n_stops();
  long removed_stops = 0;
  {
    auto all = link_drivers(records);
    for (const auto& p : all)
      if (p.n_stops() > 10) removed_stops += p.n_stops();
  }
  CHECK(total_stops + removed_stops == 200);
  CHECK(report.n_stops == 200);
  CHECK(report.n_linkable <= 200);
  CHECK(report.n_drivers == static_cast<long>(panels.size()));

  // Every stop id appears exactly once across panels.
  std::vector<std::string> ids;
  for (const auto& p : panels)
    for (const auto& s : p.stops) ids.push_back(s.stop_id);
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
}

TEST_CASE("link_drivers: output independent of input permutation") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> person(0, 15);
  std::vector<StopRecord> records;
  for (int i = 0; i < 80; ++i) {
    int pid = person(rng);
    records.push_back(co_stop("s" + std::to_string(i), "f" + std::to_string(pid),
                              "l" + std::to_string(pid), "d" + std::to_string(pid)));
  }
  auto base = link_drivers(records);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(records.begin(), records.end(), rng);
    auto shuffled = link_drivers(records);
    CHECK(shuffled == base);
  }
}

TEST_CASE("link_drivers: adding a record never splits a panel") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> person(0, 10);
  std::vector<StopRecord> records;
  for (int i = 0; i < 50; ++i) {
    int pid = person(rng);
    records.push_back(co_stop("s" + std::to_string(i), "f" + std::to_string(pid),
                              "l" + std::to_string(pid), "d" + std::to_string(pid)));
  }
  auto before = link_drivers(records);
  records.push_back(co_stop("s_new", "f3", "l3", "d3"));
  auto after = link_drivers(records);

  // Each old panel's stop set is contained in exactly one new panel.
  for (const auto& p : before) {
    int containing = 0;
    for (const auto& q : after) {
      bool all_in = true;
      for (const auto& s : p.stops) {
        bool found = false;
        for (const auto& t : q.stops)
          if (t.stop_id == s.stop_id) found = true;
        if (!found) all_in = false;
      }
      if (all_in) ++containing;
    }
    CHECK(containing == 1);
  }
}
