#pragma once

#include <Eigen/Core>

#include "cme/spectral_basis.hpp"

namespace cme {

// A function F = Σ_ij a_ij · d_j ⊗ [e_i] with two output directions, stored
// by its L2(π) coefficients a_ij = ⟨F_j, e_i⟩. Because both the input basis
// and the output pair (d_1, d_2) are orthonormal, every interpolation norm
// of F is an explicit weighted sum over this matrix.
struct CoefficientMatrix {
  SpectralBasis basis;
  Eigen::MatrixX2d a;  // n_trunc × 2

  static CoefficientMatrix zero(const SpectralBasis& basis);
};

// ‖F‖_γ = sqrt(Σ_ij μ_i^{-γ} a_ij²); γ = 0 recovers the L2(π;H_Y) norm.
// Requires γ ≥ 0 (finite for any γ here since the matrix is finite).
double gamma_norm(const CoefficientMatrix& c, double gamma);

// Elementwise difference; bases must match in (p, n_trunc).
CoefficientMatrix coefficient_difference(const CoefficientMatrix& lhs,
                                         const CoefficientMatrix& rhs);

// Ridge shrinkage of the population solution: a_ij(F_λ) = a_ij·μ_i/(μ_i+λ).
// λ = 0 is the identity; requires λ ≥ 0.
CoefficientMatrix population_coefficients(const CoefficientMatrix& truth,
                                          double lambda);

struct BiasGammaNorm {
  double value_sq;  // ‖[F_λ] − F*‖²_γ
  double bound_sq;  // ‖F*‖²_β · λ^{β−γ}; value_sq ≤ bound_sq always
};

// Requires 0 ≤ γ ≤ β ≤ 2 and λ > 0; γ > β is a domain error.
BiasGammaNorm bias_gamma_norm(const CoefficientMatrix& truth, double lambda,
                              double gamma, double beta);

}  // namespace cme
