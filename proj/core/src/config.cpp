#include "cme/config.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cme/csv.hpp"

namespace cme {

namespace {

using nlohmann::json;

const char* const kValidKeys[] = {
    "spectrum.p",         "spectrum.n_trunc",
    "source.beta",        "source.B_bar",
    "source.B_inf",       "source.band_lo",
    "source.band_hi",     "output.y_minus",
    "output.y_plus",      "output.bandwidth",
    "schedule.regime",    "schedule.r",
    "schedule.alpha",     "schedule.c_lambda",
    "schedule.calibrate", "experiment.ns",
    "experiment.replicates", "experiment.gamma",
    "experiment.tau",     "experiment.trials",
    "experiment.n",       "experiment.lambda",
    "experiment.coverage_replicates", "packing.m",
    "packing.epsilon",    "packing.gamma",
    "packing.max_members", "packing.budget",
    "seed"};

std::string valid_key_list() {
  std::string s;
  for (const char* k : kValidKeys) {
    if (!s.empty()) s += ", ";
    s += k;
  }
  return s;
}

[[noreturn]] void type_error(const std::string& key, const char* expected) {
  throw std::invalid_argument("config key \"" + key + "\": expected " +
                              expected);
}

double want_number(const std::string& key, const json& v) {
  if (!v.is_number()) type_error(key, "a number");
  return v.get<double>();
}

int want_int(const std::string& key, const json& v) {
  if (!v.is_number_integer()) type_error(key, "an integer");
  return v.get<int>();
}

bool want_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) type_error(key, "a boolean");
  return v.get<bool>();
}

std::string want_string(const std::string& key, const json& v) {
  if (!v.is_string()) type_error(key, "a string");
  return v.get<std::string>();
}

void apply(Config& cfg, const std::string& key, const json& v) {
  if (key == "spectrum.p") cfg.spectrum_p = want_number(key, v);
  else if (key == "spectrum.n_trunc") cfg.spectrum_n_trunc = want_int(key, v);
  else if (key == "source.beta") cfg.source_beta = want_number(key, v);
  else if (key == "source.B_bar") cfg.source_B_bar = want_number(key, v);
  else if (key == "source.B_inf") cfg.source_B_inf = want_number(key, v);
  else if (key == "source.band_lo") cfg.source_band_lo = want_int(key, v);
  else if (key == "source.band_hi") cfg.source_band_hi = want_int(key, v);
  else if (key == "output.y_minus") cfg.output_y_minus = want_number(key, v);
  else if (key == "output.y_plus") cfg.output_y_plus = want_number(key, v);
  else if (key == "output.bandwidth") cfg.output_bandwidth = want_number(key, v);
  else if (key == "schedule.regime") cfg.schedule_regime = want_string(key, v);
  else if (key == "schedule.r") cfg.schedule_r = want_number(key, v);
  else if (key == "schedule.alpha") cfg.schedule_alpha = want_number(key, v);
  else if (key == "schedule.c_lambda") cfg.schedule_c_lambda = want_number(key, v);
  else if (key == "schedule.calibrate") cfg.schedule_calibrate = want_bool(key, v);
  else if (key == "experiment.ns") {
    if (!v.is_array()) type_error(key, "an array of integers");
    cfg.experiment_ns.clear();
    for (const auto& e : v) cfg.experiment_ns.push_back(want_int(key, e));
  } else if (key == "experiment.replicates") {
    cfg.experiment_replicates = want_int(key, v);
  } else if (key == "experiment.gamma") {
    cfg.experiment_gamma = want_number(key, v);
  } else if (key == "experiment.tau") {
    cfg.experiment_tau = want_number(key, v);
  } else if (key == "experiment.trials") {
    cfg.experiment_trials = want_int(key, v);
  } else if (key == "experiment.n") {
    cfg.experiment_n = want_int(key, v);
  } else if (key == "experiment.lambda") {
    cfg.experiment_lambda = want_number(key, v);
  } else if (key == "experiment.coverage_replicates") {
    cfg.experiment_coverage_replicates = want_int(key, v);
  } else if (key == "packing.m") {
    cfg.packing_m = want_int(key, v);
  } else if (key == "packing.epsilon") {
    cfg.packing_epsilon = want_number(key, v);
  } else if (key == "packing.gamma") {
    cfg.packing_gamma = want_number(key, v);
  } else if (key == "packing.max_members") {
    cfg.packing_max_members = want_int(key, v);
  } else if (key == "packing.budget") {
    cfg.packing_budget = want_int(key, v);
  } else if (key == "seed") {
    if (!v.is_number_unsigned() && !v.is_number_integer())
      type_error(key, "an unsigned integer");
    cfg.seed = v.get<std::uint64_t>();
  } else {
    throw std::invalid_argument("unknown config key \"" + key +
                                "\"; valid keys: " + valid_key_list());
  }
}

// Accepts both nested objects ({"spectrum": {"p": 0.3}}) and flat dotted
// keys ({"spectrum.p": 0.3}).
void flatten(Config& cfg, const std::string& prefix, const json& node) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it.value().is_object()) {
      flatten(cfg, key, it.value());
    } else {
      apply(cfg, key, it.value());
    }
  }
}

}  // namespace

Config parse_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  if (!root.is_object())
    throw std::invalid_argument("config must be a JSON object");
  Config cfg;
  flatten(cfg, "", root);
  if (cfg.source_band_hi == 0) cfg.source_band_hi = cfg.spectrum_n_trunc;
  validate_config(cfg);
  return cfg;
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_json(ss.str());
}

void validate_config(const Config& cfg) {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("config validation: " + msg);
  };
  if (!(cfg.spectrum_p > 0.0) || cfg.spectrum_p > 1.0)
    fail("spectrum.p must lie in (0, 1]");
  if (cfg.spectrum_n_trunc < 1) fail("spectrum.n_trunc must be >= 1");
  if (!(cfg.source_beta > 0.0) || cfg.source_beta > 2.0)
    fail("source.beta must lie in (0, 2]");
  if (!(cfg.source_B_bar > 0.0)) fail("source.B_bar must be positive");
  if (!(cfg.source_B_inf > 0.0)) fail("source.B_inf must be positive");
  if (cfg.source_band_lo < 2) fail("source.band_lo must be >= 2");
  if (cfg.source_band_hi > cfg.spectrum_n_trunc)
    fail("source.band_hi must be <= spectrum.n_trunc");
  if (cfg.source_band_lo > cfg.source_band_hi)
    fail("source band is empty (band_lo > band_hi)");
  if (cfg.output_y_minus == cfg.output_y_plus)
    fail("output atoms must be distinct");
  if (!(cfg.output_bandwidth > 0.0)) fail("output.bandwidth must be positive");

  if (cfg.schedule_regime != "auto" && cfg.schedule_regime != "log" &&
      cfg.schedule_regime != "poly")
    fail("schedule.regime must be one of auto, log, poly");
  if (!(cfg.schedule_r > 1.0)) fail("schedule.r must be > 1");
  if (!(cfg.schedule_alpha > cfg.spectrum_p) || cfg.schedule_alpha > 1.0)
    fail("schedule.alpha must satisfy spectrum.p < alpha <= 1");
  if (!(cfg.schedule_c_lambda > 0.0)) fail("schedule.c_lambda must be positive");
  bool log_case = cfg.source_beta + cfg.spectrum_p <= cfg.schedule_alpha;
  if (cfg.schedule_regime == "log" && !log_case)
    fail("schedule.regime \"log\" applies exactly when beta + p <= alpha; "
         "this configuration has beta + p > alpha (use \"poly\" or \"auto\")");
  if (cfg.schedule_regime == "poly" && log_case)
    fail("schedule.regime \"poly\" applies exactly when beta + p > alpha; "
         "this configuration has beta + p <= alpha (use \"log\" or \"auto\")");

  if (cfg.experiment_ns.empty()) fail("experiment.ns must be non-empty");
  for (size_t i = 0; i < cfg.experiment_ns.size(); ++i) {
    if (cfg.experiment_ns[i] < 3) fail("experiment.ns entries must be >= 3");
    if (i > 0 && cfg.experiment_ns[i] <= cfg.experiment_ns[i - 1])
      fail("experiment.ns must be strictly increasing");
  }
  if (cfg.experiment_replicates < 1)
    fail("experiment.replicates must be >= 1");
  if (cfg.experiment_gamma < 0.0) fail("experiment.gamma must be >= 0");
  if (cfg.experiment_gamma >= cfg.source_beta)
    fail("experiment.gamma must be < source.beta");
  if (!(cfg.experiment_tau >= 1.0)) fail("experiment.tau must be >= 1");
  if (cfg.experiment_trials < 1) fail("experiment.trials must be >= 1");
  if (cfg.experiment_n < 1) fail("experiment.n must be >= 1");
  if (cfg.experiment_lambda < 0.0) fail("experiment.lambda must be >= 0");
  if (cfg.experiment_coverage_replicates < 1)
    fail("experiment.coverage_replicates must be >= 1");

  if (cfg.packing_m < 8) fail("packing.m must be >= 8");
  if (2 * cfg.packing_m > cfg.spectrum_n_trunc)
    fail("packing.m must satisfy 2m <= spectrum.n_trunc");
  if (!(cfg.packing_epsilon > 0.0)) fail("packing.epsilon must be positive");
  if (cfg.packing_gamma < 0.0) fail("packing.gamma must be >= 0");
  if (cfg.packing_gamma >= cfg.source_beta)
    fail("packing.gamma must be < source.beta");
  if (cfg.packing_max_members < 2) fail("packing.max_members must be >= 2");
  if (cfg.packing_budget < 1) fail("packing.budget must be >= 1");
}

std::string canonical_config_json(const Config& cfg) {
  json j;  // nlohmann::json object keys are kept sorted
  j["spectrum.p"] = cfg.spectrum_p;
  j["spectrum.n_trunc"] = cfg.spectrum_n_trunc;
  j["source.beta"] = cfg.source_beta;
  j["source.B_bar"] = cfg.source_B_bar;
  j["source.B_inf"] = cfg.source_B_inf;
  j["source.band_lo"] = cfg.source_band_lo;
  j["source.band_hi"] = cfg.source_band_hi;
  j["output.y_minus"] = cfg.output_y_minus;
  j["output.y_plus"] = cfg.output_y_plus;
  j["output.bandwidth"] = cfg.output_bandwidth;
  j["schedule.regime"] = cfg.schedule_regime;
  j["schedule.r"] = cfg.schedule_r;
  j["schedule.alpha"] = cfg.schedule_alpha;
  j["schedule.c_lambda"] = cfg.schedule_c_lambda;
  j["schedule.calibrate"] = cfg.schedule_calibrate;
  j["experiment.ns"] = cfg.experiment_ns;
  j["experiment.replicates"] = cfg.experiment_replicates;
  j["experiment.gamma"] = cfg.experiment_gamma;
  j["experiment.tau"] = cfg.experiment_tau;
  j["experiment.trials"] = cfg.experiment_trials;
  j["experiment.n"] = cfg.experiment_n;
  j["experiment.lambda"] = cfg.experiment_lambda;
  j["experiment.coverage_replicates"] = cfg.experiment_coverage_replicates;
  j["packing.m"] = cfg.packing_m;
  j["packing.epsilon"] = cfg.packing_epsilon;
  j["packing.gamma"] = cfg.packing_gamma;
  j["packing.max_members"] = cfg.packing_max_members;
  j["packing.budget"] = cfg.packing_budget;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

std::uint64_t config_hash(const Config& cfg) {
  // FNV-1a over the canonical rendering
  std::string s = canonical_config_json(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_manifest(const std::string& csv_path, const Config& cfg,
                    const std::vector<std::string>& output_paths) {
  char hash_hex[20];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));

  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);

  json manifest;
  manifest["config_hash"] = hash_hex;
  manifest["seed"] = cfg.seed;
  manifest["version"] = CME_VERSION;
  manifest["timestamp"] = stamp;
  manifest["output_paths"] = output_paths;
  manifest["config"] = json::parse(canonical_config_json(cfg));

  std::ofstream out(csv_path + ".manifest.json", std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write manifest beside " + csv_path);
  out << manifest.dump(2) << "\n";
}

}  // namespace cme
