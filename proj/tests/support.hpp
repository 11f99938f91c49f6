#pragma once

// Shared fixtures and random generators for the test binaries.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>

#include "csdplan/csdplan.hpp"

namespace csdplan::testing {

inline std::string data_path(const std::string& file) { return std::string(CSDPLAN_DATA_DIR) + "/" + file; }

inline const CalibrationSet& reference_calibration() {
  static const CalibrationSet cal = load_calibration_file(data_path("reference_calibration.json"));
  return cal;
}

class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  Count integer(Count lo, Count hi) { return std::uniform_int_distribution<Count>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// One random scenario drawn from the acceptance ranges: times log-uniform in
// [0.01, 1000] s, cores 1..64, k_limit 1..32, slow-downs uniform in [1, 16].
struct Scenario {
  HostProfile host;
  CsdProfile csd;
  Count cores = 1;
  SlowdownFactors sd;
};

inline Scenario random_scenario(Random& r, bool overloaded = true) {
  Scenario s;
  s.host.t_ssd_tx = r.log_uniform(0.01, 1000.0);
  s.host.t_ssd_comp_single = r.log_uniform(0.01, 1000.0);
  s.host.max_cores = 64;
  s.host.k_limit = r.integer(1, 32);
  s.csd.name = "csd";
  s.csd.t_csd_tx = r.log_uniform(0.01, 1000.0);
  s.csd.t_csd_comp = r.log_uniform(0.01, 1000.0);
  s.cores = r.integer(1, 64);
  if (overloaded) s.sd = {r.uniform(1.0, 16.0), r.uniform(1.0, 16.0)};
  return s;
}

inline RatioSet random_ratios(Random& r) {
  return {r.log_uniform(0.01, 100.0), r.log_uniform(0.01, 100.0), r.log_uniform(0.01, 100.0), r.integer(1, 64)};
}

inline SolveRequest solve_request(std::string workload, std::string host, std::string csd, Count cores) {
  SolveRequest req;
  req.workload = std::move(workload);
  req.host = std::move(host);
  req.csd = std::move(csd);
  req.cores = cores;
  return req;
}

// A valid calibration with `n` workloads on one host and two CSDs, all times random.
inline CalibrationSet random_calibration(Random& r, int n_workloads = 3) {
  CalibrationSet cal;
  cal.hosts.push_back({"h", 64, r.integer(1, 32)});
  cal.csds.push_back({"c1", std::nullopt, std::nullopt});
  cal.csds.push_back({"c2", std::nullopt, std::nullopt});
  for (int i = 0; i < n_workloads; ++i) {
    const std::string w = "w" + std::to_string(i);
    cal.workloads.push_back({w, r.log_uniform(1e6, 1e11), ""});
    for (const char* t : {"h", "c1", "c2"})
      cal.measurements.push_back({w, t, Condition::normal(), r.log_uniform(0.01, 1000.0), r.log_uniform(0.01, 1000.0)});
  }
  return cal;
}

}  // namespace csdplan::testing
