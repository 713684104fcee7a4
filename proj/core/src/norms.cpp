#include "cme/norms.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cme/random.hpp"

namespace cme {

namespace {
constexpr std::uint64_t kMcTag = 0x6d635f6c32000000ULL;  // "mc_l2"
}

CoefficientMatrix estimate_coefficients(const CmeModel& model,
                                        const TwoPointProblem& problem) {
  if (model.kx.kind != KernelKind::designed)
    throw std::invalid_argument(
        "estimate_coefficients: exact coefficients need the designed input "
        "kernel; use mc_l2_error for standard kernels");
  // a_ij = mu_i sum_l v_jl e_i(x_l) = mu_i^{1/2} (B v_j)_i: the feature
  // weights carry one factor mu^{1/2} already. feature_weights solves
  // against per-atom indicators, so rotate the two columns into the
  // orthonormal output frame (phi(y_s) = sum_j T_js d_j).
  Eigen::MatrixX2d w = feature_weights(model);
  CoefficientMatrix est = CoefficientMatrix::zero(model.kx.basis);
  est.a = (w.array().colwise() * model.kx.basis.mu.array().sqrt()).matrix() *
          problem.atom_coords.transpose();
  return est;
}

McError mc_l2_error(const CmeModel& model, const TwoPointProblem& problem,
                    int n_mc, std::uint64_t seed) {
  if (n_mc < 1) throw std::invalid_argument("mc_l2_error: n_mc must be >= 1");
  Rng rng(derive_stream(seed, kMcTag));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n_mc; ++i) {
    double v = pointwise_error_sq(model, problem, rng.uniform01());
    sum += v;
    sum_sq += v * v;
  }
  McError out;
  out.mean_sq = sum / n_mc;
  if (n_mc > 1) {
    double var = (sum_sq - sum * sum / n_mc) / (n_mc - 1);
    out.std_err = std::sqrt(std::max(var, 0.0) / n_mc);
  }
  return out;
}

VarianceBoundReport variance_bound_report(const CmeModel& model,
                                          const TwoPointProblem& problem,
                                          const CoefficientMatrix& truth,
                                          double tau, double alpha, double A,
                                          double gamma) {
  if (!(tau >= 1.0))
    throw std::domain_error("variance_bound_report: tau must be >= 1");
  const double lambda = model.lambda;
  const int n = static_cast<int>(model.xs.size());
  const SpectralBasis& basis = truth.basis;

  VarianceBoundReport rep;
  rep.n = n;
  rep.lambda = lambda;
  rep.tau = tau;
  rep.gamma = gamma;
  rep.n_lambda = effective_dimension(basis, lambda);
  rep.g_lambda = std::log(2.0 * std::exp(1.0) * rep.n_lambda * (1.0 + lambda));

  CoefficientMatrix diff =
      coefficient_difference(population_coefficients(truth, lambda), truth);
  double l2 = gamma_norm(diff, 0.0);
  rep.l2_bias_sq = l2 * l2;

  // M(lambda) = sup_x || F_lambda(x) - F*(x) ||_{H_Y}: the output pair is
  // orthonormal, so the pointwise norm is the Euclidean norm of the two
  // coefficient contractions. 4096 grid points resolve the <= n_src smooth
  // cosine modes comfortably.
  const int grid = 4096;
  std::vector<double> col(static_cast<size_t>(basis.n_trunc));
  double sup = 0.0;
  for (int g = 0; g < grid; ++g) {
    double x = static_cast<double>(g) / (grid - 1);
    eigenfunction_column(basis, x, col.data());
    double c0 = 0.0;
    double c1 = 0.0;
    for (int i = 0; i < basis.n_trunc; ++i) {
      c0 += diff.a(i, 0) * col[static_cast<size_t>(i)];
      c1 += diff.a(i, 1) * col[static_cast<size_t>(i)];
    }
    sup = std::max(sup, std::sqrt(c0 * c0 + c1 * c1));
  }
  rep.m_lambda = sup;
  rep.q_lambda = std::max(rep.m_lambda, 2.0 * problem.kappa_y);

  double kappa_y_sq = problem.kappa_y * problem.kappa_y;
  double lam_alpha = std::pow(lambda, alpha);
  rep.rhs = 576.0 * tau * tau / (n * std::pow(lambda, gamma)) *
            (4.0 * kappa_y_sq * rep.n_lambda +
             rep.l2_bias_sq * A * A / lam_alpha +
             2.0 * rep.q_lambda * rep.q_lambda * A * A / (n * lam_alpha));
  rep.guard_ok = n >= 8.0 * A * A * tau * rep.g_lambda / lam_alpha;
  return rep;
}

}  // namespace cme
