#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cme {

// Resolved experiment configuration. Every field has a default; a JSON config
// file overrides fields by dotted key (e.g. "spectrum.p"). Unknown keys and
// type mismatches are rejected at parse time.
struct Config {
  // spectrum.*
  double spectrum_p = 0.5;
  int spectrum_n_trunc = 2048;

  // source.*
  double source_beta = 1.0;
  double source_B_bar = 1.0;
  double source_B_inf = 1.0;
  int source_band_lo = 2;
  int source_band_hi = 0;  // 0 = n_trunc

  // output.*
  double output_y_minus = -1.0;
  double output_y_plus = 1.0;
  double output_bandwidth = 1.0;

  // schedule.*
  std::string schedule_regime = "auto";  // auto | log | poly
  double schedule_r = 2.0;
  double schedule_alpha = 0.55;
  double schedule_c_lambda = 1.0;
  bool schedule_calibrate = false;

  // experiment.*
  std::vector<int> experiment_ns = {128, 256, 512, 1024, 2048, 4096};
  int experiment_replicates = 20;
  double experiment_gamma = 0.0;
  double experiment_tau = 2.0;
  int experiment_trials = 2000;
  int experiment_n = 512;
  double experiment_lambda = 0.0;  // 0 = take from the schedule
  int experiment_coverage_replicates = 500;

  // packing.*
  int packing_m = 16;
  double packing_epsilon = 0.004;
  double packing_gamma = 0.0;
  int packing_max_members = 16;
  int packing_budget = 10000;

  std::uint64_t seed = 42;
};

Config parse_config(const std::string& path);
Config parse_config_json(const std::string& text);

// Canonical JSON rendering of a resolved config (sorted keys, 17-digit
// doubles); hashing this keeps manifests stable across runs.
std::string canonical_config_json(const Config& cfg);
std::uint64_t config_hash(const Config& cfg);

void validate_config(const Config& cfg);

// Writes <csv_path>.manifest.json next to a CSV output.
void write_manifest(const std::string& csv_path, const Config& cfg,
                    const std::vector<std::string>& output_paths);

}  // namespace cme
