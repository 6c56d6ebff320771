#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "perceptfe/parallel.hpp"
#include "perceptfe/types.hpp"

namespace pfe {

// Deterministic RNG helpers built on mt19937_64 substreams; every driver
// gets an independent stream derived from (seed, driver index), so
// generation parallelizes without changing output.
struct SimRng {
  explicit SimRng(uint64_t seed) : eng(seed) {}
  std::mt19937_64 eng;

  double uniform() {  // [0, 1)
    return (eng() >> 11) * 0x1.0p-53;
  }
  double normal() {  // Box-Muller, no state carried between calls
    double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(6.283185307179586 * u2);
  }
  int uniform_int(int n) {  // [0, n)
    int v = static_cast<int>(uniform() * n);
    return v >= n ? n - 1 : v;
  }
};

enum class Scenario { Null, Taste, Statistical, OfficerConfound };

const char* to_string(Scenario s);

// Generative model per stop: features X (latent trait z, appearance
// signal, officer race, county, hour, duration), perception probability
// r(X) = logistic(a0 + a1*appearance + a2*officer_hispanic), contraband
// probability p(X,r) = logistic(b0 + b1*z + b2*r), threshold
// t(X,r) = c0 + c1*r + c2*officer_hispanic. The search decision is either
// deterministic (p > t) or stochastic with probability
// logistic((p - t) / decision_scale), the default used for estimator
// validation.
struct SimConfig {
  long n_drivers = 1000;
  std::array<double, 10> stops_probs{};  // P(1 stop) .. P(10 stops)

  double trait_sd = 1.0;
  double appearance_noise_sd = 1.0;
  int officer_pool = 50;
  double officer_hispanic_frac = 0.3;
  int n_counties = 8;
  double duration_mean = 12.0;
  double duration_sd = 4.0;
  double duration_search_extra = 10.0;  // searches lengthen the stop

  double a0 = 0.0, a1 = 1.0, a2 = 0.0;
  double b0 = -2.0, b1 = 0.5, b2 = 0.0;
  double c0 = 0.15, c1 = 0.0, c2 = 0.0;

  bool stochastic_decision = true;
  double decision_scale = 0.05;
  double arrest_shift = 0.05;  // arrest threshold = t + shift

  Scenario scenario = Scenario::Null;
  uint64_t seed = 1;
  State state = State::AZ;

  // Scenario/parameter consistency and range checks; throws ConfigError.
  void validate() const;

  static SimConfig from_json_text(const std::string& text);
  static SimConfig from_file(const std::string& path);
  std::string to_json_text() const;

  // Hash over the parameters that determine the implied delta (excludes
  // seed, n_drivers, stop-count distribution).
  std::string param_hash() const;
};

struct StopFeatures {
  double z = 0.0;
  double appearance = 0.0;
  bool officer_hispanic = false;
};

// Probability the officer perceives the driver as hispanic.
double perception_probability(const StopFeatures& x, const SimConfig& cfg);

// Binarized perception: hispanic iff u < r(X).
Race perceive_race(const StopFeatures& x, const SimConfig& cfg, double u);

// P(search | X, perceived race); {0,1}-valued under deterministic decisions.
double search_probability(const StopFeatures& x, Race perceived, const SimConfig& cfg);

// Search decision; u drives the stochastic variant and is ignored by the
// deterministic one (p > t, strict).
bool search_decision(const StopFeatures& x, Race perceived, const SimConfig& cfg, double u);

struct GroundTruth {
  double delta = 0.0;      // mean of q(X, hispanic) - q(X, white) over stops
  double mc_se = 0.0;      // 0 when the value is exact
  bool exact = false;
  uint64_t gt_seed = 0;
  long n_sim = 0;
  std::string config_hash;
};

// Exact 0 when neither p nor t depends on perceived race; otherwise a
// 10^7-stop simulation on a stream derived from the parameter hash (so the
// value is independent of the panel seed). Results are memoized per
// parameter hash within the process.
GroundTruth ground_truth(const SimConfig& cfg, Exec exec = Exec::Parallel);

struct SimResult {
  std::vector<DriverPanel> panels;
  GroundTruth truth;
};

// Generates panels in the exact shape the estimators consume. Fixing the
// seed fixes every byte of the output, for any thread count.
SimResult generate_panel(const SimConfig& cfg, Exec exec = Exec::Parallel);

}  // namespace pfe
