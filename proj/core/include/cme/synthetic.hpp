#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cme/coefficient_matrix.hpp"
#include "cme/kernel.hpp"
#include "cme/spectral_basis.hpp"

namespace cme {

// A regression function f = sum_i a_i mu_i^{beta/2} e_i living exactly at
// smoothness beta relative to the basis: the stored coeffs are the a_i, so
// sum a_i^2 = B_bar^2 is the squared beta-norm of f.
struct SourceFunction {
  SpectralBasis basis;
  double beta = 1.0;
  Eigen::VectorXd coeffs;  // a_i, index i-1; zero outside [band_lo, band_hi]
  double B_bar = 1.0;      // realized beta-norm, equals requested value
  double B_inf = 1.0;      // certified sup bound after rescaling
  int active_hi = 0;       // largest 1-based index with a nonzero coefficient
};

SourceFunction make_source(const SpectralBasis& basis, double beta,
                           double B_bar, double B_inf, int band_lo, int band_hi,
                           std::uint64_t seed);

// f = c * e_1 (constant function, beta-norm |c| for every beta since mu_1 = 1).
// B_inf stays a free certificate (>= |c|) so the f = 0 fixture keeps a
// positive noise level L = 1.5 * B_inf.
SourceFunction make_constant_source(const SpectralBasis& basis, double beta,
                                    double c, double B_inf = 1.0);

double eval_source(const SourceFunction& f, double x);

// Binary-output problem: Y in {y_minus, y_plus} with
// P(Y = y_plus | X = x) = (L + f(x)) / (2L), L = 1.5 * B_inf(f).
struct TwoPointProblem {
  SourceFunction f;
  double y_minus = -1.0;
  double y_plus = 1.0;
  double L = 1.5;
  Kernel kx;              // input-side kernel (designed from f.basis)
  Kernel ky;              // output-side kernel (gaussian on the atoms)
  Eigen::Matrix2d atom_gram;    // G2_{st} = k_Y(y_s, y_t)
  Eigen::Matrix2d atom_coords;  // column j = coords of phi(y_j) in the
                                // 2-d atom feature space; T^T T = G2
  double kappa_y = 1.0;   // sup_y sqrt(k_Y(y, y))
};

TwoPointProblem make_two_point_problem(const SourceFunction& f,
                                       double y_minus = -1.0,
                                       double y_plus = 1.0,
                                       double output_bandwidth = 1.0);

// (P(Y=y_minus|x), P(Y=y_plus|x)); throws std::logic_error if |f(x)| > L.
std::pair<double, double> conditional_probability(const TwoPointProblem& problem,
                                                  double x);

struct Dataset {
  std::vector<double> xs;
  std::vector<int> atoms;  // 0 = y_minus, 1 = y_plus
};

Dataset sample_dataset(const TwoPointProblem& problem, int n,
                       std::uint64_t seed);

std::vector<double> dataset_ys(const TwoPointProblem& problem,
                               const Dataset& data);

// Exact basis coefficients of the conditional mean embedding
// x -> E[phi(Y) | X = x] for a two-point problem, expressed in the 2-d atom
// coordinate frame: column j is the coefficient vector of coordinate j.
CoefficientMatrix true_cme_coefficients(const TwoPointProblem& problem);

// Coordinates of phi(a) for an arbitrary output point a, in the same frame.
Eigen::Vector2d atom_feature_coords(const TwoPointProblem& problem, double a);

void write_dataset_csv(const std::string& path, const Dataset& data,
                       const TwoPointProblem& problem, int replicate,
                       std::uint64_t seed);

}  // namespace cme
