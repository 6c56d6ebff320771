#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "perceptfe/errors.hpp"
#include "perceptfe/ingest.hpp"
#include "support/builders.hpp"

using namespace pfe;

namespace {

const char* kAzConfig = R"json({
  "state": "az",
  "delimiter": ",",
  "columns": {
    "stop_id": "id", "date": "date", "hour": "hour", "county": "county",
    "officer_id": "officer", "perceived_race": "race", "searched": "searched",
    "arrested": "arrested", "duration_minutes": "duration"
  },
  "race_labels": {"w": "white", "h": "hispanic", "b": "black", "a": "asian_pacific",
                  "i": "other", "u": "unknown"},
  "link_keys": ["first_name", "last_name", "veh_style", "veh_year"]
})json";

const char* kTxConfig = R"json({
  "state": "tx",
  "delimiter": ",",
  "columns": {
    "stop_id": "id", "date": "date", "hour": "hour", "county": "county",
    "officer_id": "officer", "perceived_race": "race", "searched": "searched",
    "arrested": null, "duration_minutes": null
  },
  "race_labels": {"w": "white", "h": "hispanic"},
  "date_min": "2016-01-01",
  "link_keys": ["first_name", "last_name", "address"]
})json";

const char* kAzHeader = "id,date,hour,county,officer,race,searched,arrested,duration,"
                        "first_name,last_name,veh_style,veh_year\n";

std::string az_row(const std::string& id, const std::string& date, const std::string& race,
                   const std::string& searched, const std::string& first = "JOHN",
                   const std::string& last = "DOE") {
  return id + "," + date + ",14,maricopa,o12," + race + "," + searched + ",0,12.5," +
         first + "," + last + ",SEDAN,2009\n";
}

}  // namespace

TEST_CASE("load_stops: race labels normalize through the state table") {
  auto config = StateConfig::from_json_text(kAzConfig);
  std::string text = std::string(kAzHeader) + az_row("1", "2014-05-02", "W", "true") +
                     az_row("2", "2014-05-03", "h", "false") +
                     az_row("3", "2014-05-04", "ZZZ", "false");
  auto result = load_stops_text(text, config);
  REQUIRE(result.records.size() == 3);
  CHECK(result.records[0].perceived_race == Race::White);
  CHECK(result.records[1].perceived_race == Race::Hispanic);
  CHECK(result.records[2].perceived_race == Race::Unknown);  // unmapped, never dropped
  CHECK(result.records[0].searched);
  CHECK(result.records[0].hour == 14);
  CHECK(result.records[0].county == "maricopa");
  CHECK(result.records[0].duration_minutes == 12.5);
  CHECK(result.records[0].link_fields ==
        std::vector<std::string>{"john", "doe", "sedan", "2009"});
}

TEST_CASE("load_stops: race normalization is idempotent") {
  auto config = StateConfig::from_json_text(kAzConfig);
  for (const char* raw : {"W", "h", "white", "HISPANIC", "mystery", ""}) {
    Race once = config.normalize_race(raw);
    CHECK(config.normalize_race(to_string(once)) == once);
  }
}

TEST_CASE("load_stops: tx rows before 2016 are rejected by the date filter") {
  auto config = StateConfig::from_json_text(kTxConfig);
  std::string text =
      "id,date,hour,county,officer,race,searched,first_name,last_name,address\n"
      "1,2015-11-30,3,harris,o1,W,0,ANA,RUIZ,1 MAIN ST\n"
      "2,2016-02-01,3,harris,o1,W,0,ANA,RUIZ,1 MAIN ST\n";
  auto result = load_stops_text(text, config);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].stop_id == "2");
  REQUIRE(result.rejections.size() == 1);
  CHECK(result.rejections[0].row_number == 2);
  CHECK(result.rejections[0].reason == "outside configured date range");
}

TEST_CASE("load_stops: row count conservation with unparseable dates") {
  auto config = StateConfig::from_json_text(kAzConfig);
  std::string text(kAzHeader);
  for (int i = 0; i < 10; ++i) {
    std::string date = (i == 3 || i == 7) ? "not-a-date" : "2014-06-0" + std::to_string(1 + i % 9);
    text += az_row(std::to_string(i), date, "W", "0");
  }
  auto result = load_stops_text(text, config);
  CHECK(result.records.size() == 8);
  CHECK(result.rejections.size() == 2);
  CHECK(result.rejections[0].reason.find("unparseable date") == 0);
}

TEST_CASE("load_stops: missing required column is a schema error naming it") {
  auto config = StateConfig::from_json_text(kAzConfig);
  std::string text = "id,date,hour,county,officer,race,searched,arrested,duration,"
                     "first_name,last_name,veh_style\n";  // veh_year missing
  CHECK_THROWS_WITH_AS(load_stops_text(text, config),
                       "input is missing required column: veh_year", SchemaError);
}

TEST_CASE("load_stops: bad searched value rejects the row, bad optionals do not") {
  auto config = StateConfig::from_json_text(kAzConfig);
  std::string text = std::string(kAzHeader) +
                     "1,2014-05-02,99,maricopa,o12,W,maybe,0,12.5,A,B,C,D\n" +
                     "2,2014-05-02,99,maricopa,o12,W,1,xx,junk,A,B,C,D\n";
  auto result = load_stops_text(text, config);
  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].stop_id == "2");
  CHECK_FALSE(result.records[0].hour.has_value());      // 99 out of range
  CHECK_FALSE(result.records[0].arrested.has_value());  // unparseable optional
  CHECK_FALSE(result.records[0].duration_minutes.has_value());
  REQUIRE(result.rejections.size() == 1);
  CHECK(result.rejections[0].reason.find("searched") != std::string::npos);
}

TEST_CASE("load_stops: conservation holds on random inputs; order independent of threads") {
  auto config = StateConfig::from_json_text(kAzConfig);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::string text(kAzHeader);
    long n = 1 + static_cast<long>(u(rng) * 60);
    for (long i = 0; i < n; ++i) {
      std::string date = u(rng) < 0.2 ? "junk" : "2013-03-11";
      std::string searched = u(rng) < 0.1 ? "banana" : "1";
      text += az_row(std::to_string(i), date, u(rng) < 0.5 ? "W" : "H", searched);
    }
    auto par = load_stops_text(text, config, Exec::Parallel);
    auto ser = load_stops_text(text, config, Exec::Serial);
    CHECK(static_cast<long>(par.records.size() + par.rejections.size()) == n);
    CHECK(par.records == ser.records);
    CHECK(par.rejections.size() == ser.rejections.size());
  }
}

TEST_CASE("apply_validity_filters: tx pre-2016 removal is counted") {
  std::vector<StopRecord> records;
  for (int i = 0; i < 100; ++i) {
    auto s = pfe::testing::make_stop(State::TX, std::to_string(i),
                                     i < 40 ? CivilDate{2015, 6, 1} : CivilDate{2016, 6, 1},
                                     Race::White, false);
    s.link_fields = {"a", "b", "c"};
    records.push_back(s);
  }
  auto [kept, report] = apply_validity_filters(records);
  CHECK(kept.size() == 60);
  CHECK(report.n_removed_tx_pre2016 == 40);
  CHECK(report.n_removed_no_link_fields == 0);
  CHECK(report.n_input == 100);
  CHECK(report.n_kept == 60);
}

TEST_CASE("apply_validity_filters: the date rule is tx-only") {
  std::vector<StopRecord> records;
  for (int i = 0; i < 10; ++i) {
    auto s = pfe::testing::make_stop(State::AZ, std::to_string(i), CivilDate{2012, 6, 1},
                                     Race::White, false);
    s.link_fields = {"a", "b"};
    records.push_back(s);
  }
  auto [kept, report] = apply_validity_filters(records);
  CHECK(kept.size() == 10);
  CHECK(report.n_removed_tx_pre2016 == 0);
}

TEST_CASE("apply_validity_filters: a row with no link information is removed") {
  std::vector<StopRecord> records;
  for (int i = 0; i < 5; ++i) {
    auto s = pfe::testing::make_stop(State::CO, std::to_string(i), CivilDate{2014, 2, 2},
                                     Race::White, false);
    // Exactly row 3 carries no key at all; row 2 has a partial key and stays.
    if (i == 3) {
      s.link_fields = {"", "", ""};
    } else if (i == 2) {
      s.link_fields = {"ana", "", ""};
    } else {
      s.link_fields = {"ana", "ruiz", "1990-01-01"};
    }
    records.push_back(s);
  }
  auto [kept, report] = apply_validity_filters(records);
  CHECK(kept.size() == 4);
  CHECK(report.n_removed_no_link_fields == 1);
}
