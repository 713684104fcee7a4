#include "cme/coefficient_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace cme {

CoefficientMatrix CoefficientMatrix::zero(const SpectralBasis& basis) {
  CoefficientMatrix c{basis, Eigen::MatrixX2d::Zero(basis.n_trunc, 2)};
  return c;
}

double gamma_norm(const CoefficientMatrix& c, double gamma) {
  if (gamma < 0.0) throw std::domain_error("gamma_norm: gamma must be >= 0");
  double s = 0.0;
  for (int i = 0; i < c.basis.n_trunc; ++i) {
    double w = std::pow(c.basis.mu[i], -gamma);
    s += w * (c.a(i, 0) * c.a(i, 0) + c.a(i, 1) * c.a(i, 1));
  }
  return std::sqrt(s);
}

CoefficientMatrix coefficient_difference(const CoefficientMatrix& lhs,
                                         const CoefficientMatrix& rhs) {
  if (lhs.basis.n_trunc != rhs.basis.n_trunc || lhs.basis.p != rhs.basis.p)
    throw std::invalid_argument("coefficient_difference: basis mismatch");
  return {lhs.basis, lhs.a - rhs.a};
}

CoefficientMatrix population_coefficients(const CoefficientMatrix& truth,
                                          double lambda) {
  if (lambda < 0.0)
    throw std::domain_error("population_coefficients: lambda must be >= 0");
  CoefficientMatrix out{truth.basis, truth.a};
  for (int i = 0; i < truth.basis.n_trunc; ++i) {
    double shrink = truth.basis.mu[i] / (truth.basis.mu[i] + lambda);
    out.a.row(i) *= shrink;
  }
  return out;
}

BiasGammaNorm bias_gamma_norm(const CoefficientMatrix& truth, double lambda,
                              double gamma, double beta) {
  if (gamma > beta)
    throw std::domain_error("bias_gamma_norm: requires gamma <= beta");
  if (gamma < 0.0 || beta > 2.0)
    throw std::domain_error("bias_gamma_norm: requires 0 <= gamma <= beta <= 2");
  if (!(lambda > 0.0))
    throw std::domain_error("bias_gamma_norm: lambda must be > 0");
  CoefficientMatrix diff =
      coefficient_difference(population_coefficients(truth, lambda), truth);
  double value = gamma_norm(diff, gamma);
  double norm_beta = gamma_norm(truth, beta);
  return {value * value,
          norm_beta * norm_beta * std::pow(lambda, beta - gamma)};
}

}  // namespace cme
