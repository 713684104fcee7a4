#pragma once

#include <cstdint>
#include <vector>

#include "cme/synthetic.hpp"

namespace cme {

enum class Regime { log_regime, poly_regime };

struct ScheduleSpec {
  Regime regime = Regime::poly_regime;
  double alpha = 0.55;
  double beta = 1.0;
  double p = 0.5;
  double r = 2.0;         // log exponent, only used in the log regime
  double c_lambda = 1.0;  // multiplicative constant in front of the schedule
};

// lambda_n: c (n / log^r n)^{-1/alpha} in the log regime (valid iff
// beta + p <= alpha), c n^{-1/(beta+p)} otherwise (valid iff beta + p > alpha).
double lambda_schedule(const ScheduleSpec& spec, int n);

// Upper-rate exponent (beta - gamma) / max{alpha, beta + p}; the expected
// log-log slope of err^2 vs n is the negative of this.
double theoretical_exponent(const ScheduleSpec& spec, double gamma);

struct RateRecord {
  int n = 0;
  int replicate = 0;
  double lambda = 0.0;
  double err_sq = 0.0;
  bool guard_ok = false;
};

struct SlopeFit {
  double slope = 0.0;
  double slope_se = 0.0;
  bool degenerate = false;  // some group median was <= 0 (fit not meaningful)
};

// OLS of log(median err^2 at n) against log n; needs >= 4 distinct n.
SlopeFit fit_slope(const std::vector<RateRecord>& records);

struct RateResult {
  std::vector<RateRecord> records;
  double gamma = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  double theoretical = 0.0;  // negative of theoretical_exponent
  bool degenerate = false;
  double c_lambda = 1.0;     // constant actually used (after calibration)
};

RateResult run_rate_experiment(const TwoPointProblem& problem,
                               const ScheduleSpec& spec,
                               const std::vector<int>& ns, int replicates,
                               double gamma, std::uint64_t seed,
                               int threads = 1);

// Pick c in {1/4, 1/2, 1, 2, 4} minimizing median err^2 at the smallest n
// (few replicates), then return the spec with that constant.
ScheduleSpec calibrate_c_lambda(const TwoPointProblem& problem,
                                const ScheduleSpec& spec, int n_smallest,
                                int replicates, double gamma,
                                std::uint64_t seed);

}  // namespace cme
