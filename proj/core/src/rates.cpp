#include "cme/rates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>
#include <vector>

#include "cme/estimator.hpp"
#include "cme/norms.hpp"
#include "cme/random.hpp"

namespace cme {

namespace {

constexpr std::uint64_t kRateTag = 0x7261746500000000ULL;   // "rate"
constexpr std::uint64_t kCalibTag = 0x63616c6962000000ULL;  // "calib"

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

void check_spec(const ScheduleSpec& spec) {
  if (!(spec.r > 1.0))
    throw std::invalid_argument("lambda_schedule: r must be > 1");
  if (!(spec.c_lambda > 0.0))
    throw std::invalid_argument("lambda_schedule: c_lambda must be > 0");
  bool log_case = spec.beta + spec.p <= spec.alpha;
  if (spec.regime == Regime::log_regime && !log_case)
    throw std::invalid_argument(
        "lambda_schedule: log regime requires beta + p <= alpha");
  if (spec.regime == Regime::poly_regime && log_case)
    throw std::invalid_argument(
        "lambda_schedule: polynomial regime requires beta + p > alpha");
}

}  // namespace

double lambda_schedule(const ScheduleSpec& spec, int n) {
  if (n < 3)
    throw std::invalid_argument("lambda_schedule: n must be >= 3");
  check_spec(spec);
  if (spec.regime == Regime::log_regime) {
    double logn = std::log(static_cast<double>(n));
    return spec.c_lambda *
           std::pow(n / std::pow(logn, spec.r), -1.0 / spec.alpha);
  }
  return spec.c_lambda *
         std::pow(static_cast<double>(n), -1.0 / (spec.beta + spec.p));
}

double theoretical_exponent(const ScheduleSpec& spec, double gamma) {
  if (gamma >= spec.beta)
    throw std::domain_error("theoretical_exponent: requires gamma < beta");
  if (gamma < 0.0)
    throw std::domain_error("theoretical_exponent: requires gamma >= 0");
  return (spec.beta - gamma) / std::max(spec.alpha, spec.beta + spec.p);
}

SlopeFit fit_slope(const std::vector<RateRecord>& records) {
  std::map<int, std::vector<double>> by_n;
  for (const auto& r : records) by_n[r.n].push_back(r.err_sq);
  if (by_n.size() < 4)
    throw std::invalid_argument("fit_slope: need >= 4 distinct n values");

  SlopeFit fit;
  std::vector<double> lx, ly;
  for (auto& [n, errs] : by_n) {
    double med = median(errs);
    if (!(med > 0.0)) {
      fit.degenerate = true;
      return fit;
    }
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(med));
  }

  const size_t k = lx.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < k; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < k; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (size_t i = 0; i < k; ++i) {
    double res = ly[i] - my - fit.slope * (lx[i] - mx);
    rss += res * res;
  }
  fit.slope_se = k > 2 ? std::sqrt(rss / (k - 2) / sxx) : 0.0;
  return fit;
}

RateResult run_rate_experiment(const TwoPointProblem& problem,
                               const ScheduleSpec& spec,
                               const std::vector<int>& ns, int replicates,
                               double gamma, std::uint64_t seed, int threads) {
  if (ns.size() < 4)
    throw std::invalid_argument("run_rate_experiment: need >= 4 n values");
  for (size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1])
      throw std::invalid_argument(
          "run_rate_experiment: ns must be strictly increasing");
  if (replicates < 5)
    throw std::invalid_argument("run_rate_experiment: need >= 5 replicates");

  CoefficientMatrix truth = true_cme_coefficients(problem);
  double A = embedding_constant(problem.f.basis, spec.alpha).a_analytic;

  // Per-n schedule and guard (recorded at tau = 1; informational per cell).
  std::vector<double> lambdas(ns.size());
  std::vector<bool> guards(ns.size());
  for (size_t i = 0; i < ns.size(); ++i) {
    lambdas[i] = lambda_schedule(spec, ns[i]);
    double n_lam = effective_dimension(problem.f.basis, lambdas[i]);
    double g_lam = std::log(2.0 * std::exp(1.0) * n_lam * (1.0 + lambdas[i]));
    guards[i] =
        ns[i] >= 8.0 * A * A * g_lam * std::pow(lambdas[i], -spec.alpha);
  }

  RateResult result;
  result.gamma = gamma;
  result.c_lambda = spec.c_lambda;
  result.records.resize(ns.size() * static_cast<size_t>(replicates));

  auto run_cell = [&](size_t i, int rep) {
    int n = ns[i];
    std::uint64_t cell_seed =
        derive_stream(seed, kRateTag,
                      static_cast<std::uint64_t>(n) * 1000003ULL +
                          static_cast<std::uint64_t>(rep));
    Dataset data = sample_dataset(problem, n, cell_seed);
    CmeModel model = fit_cme(problem, data, lambdas[i]);
    CoefficientMatrix est = estimate_coefficients(model, problem);
    double err = gamma_norm(coefficient_difference(est, truth), gamma);
    RateRecord& rec = result.records[i * replicates + rep];
    rec.n = n;
    rec.replicate = rep;
    rec.lambda = lambdas[i];
    rec.err_sq = err * err;
    rec.guard_ok = guards[i];
  };

  const size_t total = result.records.size();
  if (threads <= 1) {
    for (size_t i = 0; i < ns.size(); ++i)
      for (int rep = 0; rep < replicates; ++rep) run_cell(i, rep);
  } else {
    // Cells are independent; records are preallocated and each worker writes
    // disjoint slots, so merging is deterministic by construction.
    std::vector<std::thread> pool;
    int t_count = std::min<int>(threads, static_cast<int>(total));
    for (int t = 0; t < t_count; ++t) {
      pool.emplace_back([&, t]() {
        for (size_t cell = static_cast<size_t>(t); cell < total;
             cell += static_cast<size_t>(t_count)) {
          run_cell(cell / replicates, static_cast<int>(cell % replicates));
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  SlopeFit fit = fit_slope(result.records);
  result.slope = fit.slope;
  result.slope_se = fit.slope_se;
  result.degenerate = fit.degenerate;
  result.theoretical = -theoretical_exponent(spec, gamma);
  return result;
}

ScheduleSpec calibrate_c_lambda(const TwoPointProblem& problem,
                                const ScheduleSpec& spec, int n_smallest,
                                int replicates, double gamma,
                                std::uint64_t seed) {
  if (replicates < 1)
    throw std::invalid_argument("calibrate_c_lambda: replicates must be >= 1");
  CoefficientMatrix truth = true_cme_coefficients(problem);
  const double grid[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  ScheduleSpec best = spec;
  double best_err = -1.0;
  for (double c : grid) {
    ScheduleSpec cand = spec;
    cand.c_lambda = c;
    double lambda = lambda_schedule(cand, n_smallest);
    std::vector<double> errs;
    for (int rep = 0; rep < replicates; ++rep) {
      std::uint64_t cell_seed = derive_stream(
          seed, kCalibTag,
          static_cast<std::uint64_t>(n_smallest) * 1000003ULL +
              static_cast<std::uint64_t>(rep));
      Dataset data = sample_dataset(problem, n_smallest, cell_seed);
      CmeModel model = fit_cme(problem, data, lambda);
      CoefficientMatrix est = estimate_coefficients(model, problem);
      double err = gamma_norm(coefficient_difference(est, truth), gamma);
      errs.push_back(err * err);
    }
    double med = median(errs);
    if (best_err < 0.0 || med < best_err) {
      best_err = med;
      best = cand;
    }
  }
  return best;
}

}  // namespace cme
