#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cme/coefficient_matrix.hpp"
#include "cme/spectral_basis.hpp"
#include "cme/synthetic.hpp"

namespace cme {

// A 4*eps-separated (in gamma-norm) family of regression functions supported
// on eigenindices (m, 2m], built from near-orthogonal sign codewords.
struct PackingFamily {
  SpectralBasis basis;
  double epsilon = 0.0;  // realized separation / 4
  int m = 16;
  double eta = 0.0;      // per-coordinate amplitude
  double gamma = 0.0;
  double beta = 1.0;
  double p = 0.5;
  double c_constant = 1.0;  // recorded constant in the L2 proximity bound
  std::vector<std::vector<int>> codewords;  // sign patterns in {-1,+1}^m
  std::vector<Eigen::VectorXd> members;     // full coefficient vectors a_i
};

PackingFamily build_packing(const SpectralBasis& basis, double beta,
                            double gamma, double p, double epsilon, int m,
                            std::uint64_t seed, int max_members = 16,
                            int budget = 10000, double B_inf = 1.0);

// One TwoPointProblem per packing member, sharing atoms, L, and kernels with
// the template problem.
std::vector<TwoPointProblem> adversarial_family(
    const PackingFamily& packing, const TwoPointProblem& tmpl);

// KL(P_i || P_j) between joint laws of one (X, Y) pair, via quadrature over x.
double kl_divergence(const TwoPointProblem& pi, const TwoPointProblem& pj,
                     int quad_nodes = 256);

struct KlReport {
  int i = 0;
  int j = 0;
  double kl = 0.0;
  double bound = 0.0;
  bool ok = false;
};

std::vector<KlReport> kl_bound_check(const PackingFamily& packing,
                                     const std::vector<TwoPointProblem>& problems,
                                     double B_inf);

struct BernsteinReport {
  int n = 0;
  double tau = 1.0;
  int trials = 0;
  int exceed_count = 0;
  double fraction = 0.0;
  double threshold = 0.0;
  double bound = 0.0;  // 2 e^{-tau}
  bool ok = false;
};

// Empirical check of the sample-mean concentration the variance analysis
// rests on, for the zero-signal (fair coin) fixture.
BernsteinReport bernstein_check(const TwoPointProblem& problem, int n,
                                double tau, int trials, std::uint64_t seed);

using Learner = std::function<CoefficientMatrix(const Dataset&,
                                                const TwoPointProblem&)>;

struct MinimaxRow {
  int n = 0;
  std::vector<double> member_median_err_sq;  // one entry per family member
  double worst_median_err_sq = 0.0;          // empirical minimax proxy
};

struct MinimaxResult {
  std::vector<MinimaxRow> rows;
  double gamma = 0.0;
  double exponent = 0.0;  // predicted decay exponent of the worst-case risk
  double slope = 0.0;     // fitted log-log slope of the worst-case risk
  double slope_se = 0.0;
  // Floor for any learner that ignores the data: 4 eps times the squared
  // output-space length of the (phi(y+) - phi(y-)) / 2L direction.
  double separation_floor = 0.0;
};

// Evaluate a learner against the adversarial family; the learner sees only
// the dataset and the shared problem template, never which member generated
// the data.
MinimaxResult minimax_probe(const std::vector<TwoPointProblem>& problems,
                            const PackingFamily& packing, const Learner& learner,
                            const std::vector<int>& ns, int replicates,
                            double gamma, double alpha, std::uint64_t seed);

}  // namespace cme
