#pragma once

#include <cstdint>

#include "cme/coefficient_matrix.hpp"
#include "cme/estimator.hpp"
#include "cme/synthetic.hpp"

namespace cme {

// Basis coefficients a_ij = mu_i sum_l v_jl e_i(x_l) of the fitted embedding,
// in the atom coordinate frame shared with true_cme_coefficients. Requires a
// designed-kernel fit (the expansion is exact there); for other kernels use
// mc_l2_error.
CoefficientMatrix estimate_coefficients(const CmeModel& model,
                                        const TwoPointProblem& problem);

struct McError {
  double mean_sq = 0.0;
  double std_err = 0.0;
};

// Monte Carlo estimate of E_x || Fhat(x) - F*(x) ||^2 with x ~ Uniform[0,1];
// works for any input kernel.
McError mc_l2_error(const CmeModel& model, const TwoPointProblem& problem,
                    int n_mc, std::uint64_t seed);

struct VarianceBoundReport {
  int n = 0;
  double lambda = 0.0;
  double tau = 1.0;
  double gamma = 0.0;
  double n_lambda = 0.0;   // effective dimension N(lambda)
  double g_lambda = 0.0;   // log(2e N(lambda) (|C| + lambda) / |C|), |C| = 1
  double m_lambda = 0.0;   // sup-norm proxy sup_x |f_lambda(x) - f*(x)| scale
  double q_lambda = 0.0;   // max{ M(lambda), 2 kappa_y }
  double l2_bias_sq = 0.0; // || F* - [F_lambda] ||^2_{L2}
  double rhs = 0.0;        // high-probability variance bound value
  bool guard_ok = false;   // n >= 8 A^2 tau g_lambda lambda^{-alpha}
};

// Finite-sample variance bound for || [Fhat] - [F_lambda] ||_gamma^2 at
// confidence tau, embedding exponent alpha with constant A.
VarianceBoundReport variance_bound_report(const CmeModel& model,
                                          const TwoPointProblem& problem,
                                          const CoefficientMatrix& truth,
                                          double tau, double alpha, double A,
                                          double gamma = 0.0);

}  // namespace cme
