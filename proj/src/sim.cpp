#include "perceptfe/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "perceptfe/errors.hpp"
#include "perceptfe/hash.hpp"
#include "perceptfe/stats.hpp"

namespace pfe {

using nlohmann::json;

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Null: return "null";
    case Scenario::Taste: return "taste_discrimination";
    case Scenario::Statistical: return "statistical_discrimination";
    case Scenario::OfficerConfound: return "officer_confound";
  }
  return "?";
}

namespace {

Scenario scenario_from_string(const std::string& s) {
  if (s == "null") return Scenario::Null;
  if (s == "taste_discrimination" || s == "taste") return Scenario::Taste;
  if (s == "statistical_discrimination" || s == "statistical") return Scenario::Statistical;
  if (s == "officer_confound") return Scenario::OfficerConfound;
  throw ConfigError("unknown scenario: " + s);
}

constexpr int64_t kSimEpochDays = 16801;  // 2016-01-01
constexpr int kSimDateSpanDays = 1096;    // through 2018-12-31

CivilDate date_from_serial(int64_t serial) {
  // Inverse of CivilDate::serial (civil-from-days).
  int64_t z = serial + 719468;
  int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  unsigned doe = static_cast<unsigned>(z - era * 146097);
  unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  int64_t y = static_cast<int64_t>(yoe) + era * 400;
  unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  unsigned mp = (5 * doy + 2) / 153;
  unsigned d = doy - (153 * mp + 2) / 5 + 1;
  unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

std::string pad_id(const char* prefix, long v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*ld", prefix, width, v);
  return buf;
}

}  // namespace

void SimConfig::validate() const {
  if (n_drivers <= 0) throw ConfigError("n_drivers must be positive");
  double total = 0.0;
  for (double p : stops_probs) {
    if (p < 0.0 || !std::isfinite(p)) throw ConfigError("stop-count probabilities must be >= 0");
    total += p;
  }
  if (total <= 0.0) throw ConfigError("stop-count distribution has no mass");
  if (trait_sd < 0 || appearance_noise_sd < 0 || duration_sd < 0)
    throw ConfigError("standard deviations must be nonnegative");
  if (officer_pool <= 0 || n_counties <= 0)
    throw ConfigError("officer_pool and n_counties must be positive");
  if (officer_hispanic_frac < 0.0 || officer_hispanic_frac > 1.0)
    throw ConfigError("officer_hispanic_frac must lie in [0,1]");
  if (stochastic_decision && decision_scale <= 0.0)
    throw ConfigError("decision_scale must be positive for stochastic decisions");
  for (double v : {a0, a1, a2, b0, b1, b2, c0, c1, c2})
    if (!std::isfinite(v)) throw ConfigError("model parameters must be finite");

  // Thresholds are probabilities; r = 0/1 and officer indicator bound the range.
  for (double r : {0.0, 1.0})
    for (double o : {0.0, 1.0}) {
      double t = c0 + c1 * r + c2 * o;
      if (t < 0.0 || t > 1.0)
        throw ConfigError("threshold t(X,r) leaves [0,1] at r=" + std::to_string(r) +
                          ", officer=" + std::to_string(o));
    }

  switch (scenario) {
    case Scenario::Null:
      if (b2 != 0.0 || c1 != 0.0 || c2 != 0.0)
        throw ConfigError("null scenario requires b2 = c1 = c2 = 0");
      break;
    case Scenario::Taste:
      if (c1 == 0.0) throw ConfigError("taste scenario requires c1 != 0");
      if (b2 != 0.0) throw ConfigError("taste scenario requires b2 = 0");
      break;
    case Scenario::Statistical:
      if (b2 == 0.0) throw ConfigError("statistical scenario requires b2 != 0");
      if (c1 != 0.0) throw ConfigError("statistical scenario requires c1 = 0");
      break;
    case Scenario::OfficerConfound:
      if (a2 == 0.0 || c2 == 0.0)
        throw ConfigError("officer_confound scenario requires a2 != 0 and c2 != 0");
      break;
  }
}

std::string SimConfig::to_json_text() const {
  json j;
  j["n_drivers"] = n_drivers;
  json sp = json::object();
  for (int k = 0; k < 10; ++k)
    if (stops_probs[k] > 0.0) sp[std::to_string(k + 1)] = stops_probs[k];
  j["stops_per_driver"] = sp;
  j["trait_sd"] = trait_sd;
  j["appearance_noise_sd"] = appearance_noise_sd;
  j["officer_pool"] = officer_pool;
  j["officer_hispanic_frac"] = officer_hispanic_frac;
  j["n_counties"] = n_counties;
  j["duration_mean"] = duration_mean;
  j["duration_sd"] = duration_sd;
  j["duration_search_extra"] = duration_search_extra;
  j["perception"] = {{"a0", a0}, {"a1", a1}, {"a2", a2}};
  j["risk"] = {{"b0", b0}, {"b1", b1}, {"b2", b2}};
  j["threshold"] = {{"c0", c0}, {"c1", c1}, {"c2", c2}};
  j["stochastic_decision"] = stochastic_decision;
  j["decision_scale"] = decision_scale;
  j["arrest_shift"] = arrest_shift;
  j["scenario"] = to_string(scenario);
  j["seed"] = seed;
  j["state"] = to_string(state);
  return j.dump(2) + "\n";
}

SimConfig SimConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sim config: invalid JSON: ") + e.what());
  }
  SimConfig c;
  c.n_drivers = j.value("n_drivers", c.n_drivers);
  c.stops_probs.fill(0.0);
  if (j.contains("stops_per_driver")) {
    for (const auto& [k, v] : j.at("stops_per_driver").items()) {
      int count = std::stoi(k);
      if (count < 1 || count > 10)
        throw ConfigError("stops_per_driver support must lie in 1..10");
      c.stops_probs[count - 1] = v.get<double>();
    }
  } else {
    c.stops_probs[0] = 1.0;
  }
  c.trait_sd = j.value("trait_sd", c.trait_sd);
  c.appearance_noise_sd = j.value("appearance_noise_sd", c.appearance_noise_sd);
  c.officer_pool = j.value("officer_pool", c.officer_pool);
  c.officer_hispanic_frac = j.value("officer_hispanic_frac", c.officer_hispanic_frac);
  c.n_counties = j.value("n_counties", c.n_counties);
  c.duration_mean = j.value("duration_mean", c.duration_mean);
  c.duration_sd = j.value("duration_sd", c.duration_sd);
  c.duration_search_extra = j.value("duration_search_extra", c.duration_search_extra);
  if (j.contains("perception")) {
    const auto& p = j.at("perception");
    c.a0 = p.value("a0", c.a0);
    c.a1 = p.value("a1", c.a1);
    c.a2 = p.value("a2", c.a2);
  }
  if (j.contains("risk")) {
    const auto& p = j.at("risk");
    c.b0 = p.value("b0", c.b0);
    c.b1 = p.value("b1", c.b1);
    c.b2 = p.value("b2", c.b2);
  }
  if (j.contains("threshold")) {
    const auto& p = j.at("threshold");
    c.c0 = p.value("c0", c.c0);
    c.c1 = p.value("c1", c.c1);
    c.c2 = p.value("c2", c.c2);
  }
  c.stochastic_decision = j.value("stochastic_decision", c.stochastic_decision);
  c.decision_scale = j.value("decision_scale", c.decision_scale);
  c.arrest_shift = j.value("arrest_shift", c.arrest_shift);
  c.scenario = scenario_from_string(j.value("scenario", "null"));
  c.seed = j.value("seed", c.seed);
  if (j.contains("state")) {
    auto st = state_from_string(j.at("state").get<std::string>());
    if (!st) throw ConfigError("sim config: bad state");
    c.state = *st;
  }
  c.validate();
  return c;
}

SimConfig SimConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sim config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string SimConfig::param_hash() const {
  json j;
  j["trait_sd"] = trait_sd;
  j["appearance_noise_sd"] = appearance_noise_sd;
  j["officer_hispanic_frac"] = officer_hispanic_frac;
  j["perception"] = {{"a0", a0}, {"a1", a1}, {"a2", a2}};
  j["risk"] = {{"b0", b0}, {"b1", b1}, {"b2", b2}};
  j["threshold"] = {{"c0", c0}, {"c1", c1}, {"c2", c2}};
  j["stochastic_decision"] = stochastic_decision;
  j["decision_scale"] = decision_scale;
  return content_id(j.dump());
}

double perception_probability(const StopFeatures& x, const SimConfig& cfg) {
  double r = logistic(cfg.a0 + cfg.a1 * x.appearance + cfg.a2 * (x.officer_hispanic ? 1.0 : 0.0));
  if (!(r >= 0.0 && r <= 1.0))
    throw ConfigError("perception probability left [0,1]");
  return r;
}

Race perceive_race(const StopFeatures& x, const SimConfig& cfg, double u) {
  return u < perception_probability(x, cfg) ? Race::Hispanic : Race::White;
}

double search_probability(const StopFeatures& x, Race perceived, const SimConfig& cfg) {
  const double r = perceived == Race::Hispanic ? 1.0 : 0.0;
  const double officer = x.officer_hispanic ? 1.0 : 0.0;
  const double p = logistic(cfg.b0 + cfg.b1 * x.z + cfg.b2 * r);
  const double t = cfg.c0 + cfg.c1 * r + cfg.c2 * officer;
  if (cfg.stochastic_decision) return logistic((p - t) / cfg.decision_scale);
  return p > t ? 1.0 : 0.0;
}

bool search_decision(const StopFeatures& x, Race perceived, const SimConfig& cfg, double u) {
  if (cfg.stochastic_decision) return u < search_probability(x, perceived, cfg);
  return search_probability(x, perceived, cfg) > 0.5;
}

namespace {

double arrest_probability(const StopFeatures& x, Race perceived, const SimConfig& cfg) {
  const double r = perceived == Race::Hispanic ? 1.0 : 0.0;
  const double officer = x.officer_hispanic ? 1.0 : 0.0;
  const double p = logistic(cfg.b0 + cfg.b1 * x.z + cfg.b2 * r);
  const double t = std::min(1.0, cfg.c0 + cfg.c1 * r + cfg.c2 * officer + cfg.arrest_shift);
  if (cfg.stochastic_decision) return logistic((p - t) / cfg.decision_scale);
  return p > t ? 1.0 : 0.0;
}

// Officer race table from a dedicated substream: same for every driver.
std::vector<uint8_t> officer_table(const SimConfig& cfg) {
  SimRng rng(mix_seed(cfg.seed, 0x0ff1ce5ULL));
  std::vector<uint8_t> hisp(cfg.officer_pool);
  for (int i = 0; i < cfg.officer_pool; ++i)
    hisp[i] = rng.uniform() < cfg.officer_hispanic_frac ? 1 : 0;
  return hisp;
}

DriverPanel simulate_driver(long index, const SimConfig& cfg,
                            const std::vector<uint8_t>& officer_hisp) {
  SimRng rng(mix_seed(cfg.seed, static_cast<uint64_t>(index)));
  DriverPanel panel;
  panel.driver_id = pad_id("d", index, 8);
  panel.linkable = true;

  const double z = rng.normal() * cfg.trait_sd;

  double total = 0.0;
  for (double p : cfg.stops_probs) total += p;
  double u = rng.uniform() * total;
  int n_stops = 10;
  double acc = 0.0;
  for (int k = 0; k < 10; ++k) {
    acc += cfg.stops_probs[k];
    if (u < acc) {
      n_stops = k + 1;
      break;
    }
  }

  for (int s = 0; s < n_stops; ++s) {
    StopRecord stop;
    stop.state = cfg.state;
    stop.stop_id = panel.driver_id + "_" + std::to_string(s);
    stop.date = date_from_serial(kSimEpochDays + rng.uniform_int(kSimDateSpanDays));
    stop.hour = rng.uniform_int(24);
    stop.county = pad_id("c", rng.uniform_int(cfg.n_counties), 2);
    int officer = rng.uniform_int(cfg.officer_pool);
    stop.officer_id = pad_id("o", officer, 4);

    StopFeatures x;
    x.z = z;
    x.appearance = z + rng.normal() * cfg.appearance_noise_sd;
    x.officer_hispanic = officer_hisp[officer] != 0;

    stop.perceived_race = perceive_race(x, cfg, rng.uniform());
    stop.searched = search_decision(x, stop.perceived_race, cfg, rng.uniform());
    double u_arrest = rng.uniform();
    if (cfg.state != State::TX)
      stop.arrested = u_arrest < arrest_probability(x, stop.perceived_race, cfg);
    double dur_noise = rng.normal();
    if (cfg.state == State::AZ) {
      double dur = cfg.duration_mean + cfg.duration_sd * dur_noise +
                   (stop.searched ? cfg.duration_search_extra : 0.0);
      stop.duration_minutes = std::max(1.0, dur);
    }
    panel.stops.push_back(std::move(stop));
  }
  panel.sort_stops();
  return panel;
}

}  // namespace

GroundTruth ground_truth(const SimConfig& cfg, Exec exec) {
  GroundTruth gt;
  gt.config_hash = cfg.param_hash();
  if (cfg.b2 == 0.0 && cfg.c1 == 0.0) {
    // Perceived race enters neither p nor t: the effect is exactly zero.
    gt.delta = 0.0;
    gt.exact = true;
    return gt;
  }

  static std::map<std::string, GroundTruth> memo;
  auto it = memo.find(gt.config_hash);
  if (it != memo.end()) return it->second;

  gt.gt_seed = fnv1a64(gt.config_hash);
  const long n_chunks = 1000;
  const long per_chunk = 10000;
  gt.n_sim = n_chunks * per_chunk;

  std::vector<double> sums(n_chunks, 0.0), sq_sums(n_chunks, 0.0);
  auto run_chunk = [&](long c) {
    SimRng rng(mix_seed(gt.gt_seed, static_cast<uint64_t>(c)));
    double s = 0.0, s2 = 0.0;
    for (long i = 0; i < per_chunk; ++i) {
      StopFeatures x;
      x.z = rng.normal() * cfg.trait_sd;
      x.appearance = x.z + rng.normal() * cfg.appearance_noise_sd;
      x.officer_hispanic = rng.uniform() < cfg.officer_hispanic_frac;
      double d = search_probability(x, Race::Hispanic, cfg) -
                 search_probability(x, Race::White, cfg);
      s += d;
      s2 += d * d;
    }
    sums[c] = s;
    sq_sums[c] = s2;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    for (long c = 0; c < n_chunks; ++c) run_chunk(c);
  }
  double total = 0.0, total_sq = 0.0;
  for (long c = 0; c < n_chunks; ++c) {
    total += sums[c];
    total_sq += sq_sums[c];
  }
  const double n = static_cast<double>(gt.n_sim);
  gt.delta = total / n;
  double var = std::max(0.0, total_sq / n - gt.delta * gt.delta);
  gt.mc_se = std::sqrt(var / n);
  memo[gt.config_hash] = gt;
  return gt;
}

SimResult generate_panel(const SimConfig& cfg, Exec exec) {
  cfg.validate();
  SimResult out;
  const auto officers = officer_table(cfg);
  out.panels.resize(cfg.n_drivers);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < cfg.n_drivers; ++i)
      out.panels[i] = simulate_driver(i, cfg, officers);
  } else {
    for (long i = 0; i < cfg.n_drivers; ++i)
      out.panels[i] = simulate_driver(i, cfg, officers);
  }
  out.truth = ground_truth(cfg, exec);
  return out;
}

}  // namespace pfe
