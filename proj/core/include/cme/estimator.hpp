#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cme/coefficient_matrix.hpp"
#include "cme/kernel.hpp"
#include "cme/synthetic.hpp"

namespace cme {

// Ridge-regularized conditional mean embedding estimate from n pairs.
// The fitted map is x -> sum_l beta_l(x) phi_Y(y_l) with
// beta(x) = (K_X + n lambda I)^{-1} k_x.
//
// For the designed kernel with n_trunc <= n the solve is routed through the
// m x m feature Gram (B B^T + c I) instead of the n x n kernel Gram; the two
// routes agree exactly in exact arithmetic.
struct CmeModel {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<int> atom_idx;  // per-sample atom index when fitted from a
                              // TwoPointProblem; empty otherwise
  double lambda = 0.0;
  double ridge = 0.0;  // n * lambda + jitter, the constant actually inverted
  Kernel kx;
  Kernel ky;
  bool primal = false;
  Eigen::MatrixXd b_feat;  // m x n scaled feature matrix D^{1/2} Phi (primal)
  Eigen::LLT<Eigen::MatrixXd> factor;  // of K + ridge*I (dual) or
                                       // B B^T + ridge*I (primal)

  // beta(x) for a single evaluation point.
  Eigen::VectorXd dual_weights(double x) const;

  // (K + ridge I)^{-1} t for an arbitrary right-hand side.
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& t) const;
};

CmeModel fit_cme(const std::vector<double>& xs, const std::vector<double>& ys,
                 double lambda, const Kernel& kx, const Kernel& ky);

CmeModel fit_cme(const TwoPointProblem& problem, const Dataset& data,
                 double lambda);

// g^T beta(x) for per-sample values g_l = g(y_l); this is the plug-in
// estimate of E[g(Y) | X = x].
double conditional_expectation(const CmeModel& model,
                               const Eigen::VectorXd& g_values, double x);

// || Fhat(x) - F*(x) ||^2 in the output RKHS at a single x, computed in
// closed form through the 2x2 atom Gram (requires atom-valued ys).
double pointwise_error_sq(const CmeModel& model, const TwoPointProblem& problem,
                          double x);

// W (m x 2): column j = B v_j where v_j = (K + ridge I)^{-1} t_j and
// t_j[l] = [atom_idx[l] == j]. Only valid for designed-kernel fits.
Eigen::MatrixX2d feature_weights(const CmeModel& model);

}  // namespace cme
