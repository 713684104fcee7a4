#include "cme/spectral_basis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cme {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
}  // namespace

SpectralBasis SpectralBasis::make(double p, int n_trunc) {
  if (!(p > 0.0) || p > 1.0)
    throw std::domain_error("SpectralBasis: p must lie in (0, 1]");
  if (n_trunc < 1)
    throw std::invalid_argument("SpectralBasis: n_trunc must be >= 1");
  SpectralBasis b;
  b.p = p;
  b.n_trunc = n_trunc;
  b.mu.resize(n_trunc);
  for (int i = 1; i <= n_trunc; ++i)
    b.mu[i - 1] = std::pow(static_cast<double>(i), -1.0 / p);
  return b;
}

double SpectralBasis::tail_mass_bound() const {
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  // Σ_{i>m} i^{-1/p} <= ∫_m^∞ x^{-1/p} dx = p/(1-p) · m^{1-1/p}
  return p / (1.0 - p) * std::pow(static_cast<double>(n_trunc), 1.0 - 1.0 / p);
}

double eigenfunction_eval(const SpectralBasis& basis, int i, double x) {
  if (i < 1 || i > basis.n_trunc)
    throw std::invalid_argument("eigenfunction_eval: index out of range");
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("eigenfunction_eval: x outside [0,1]");
  if (i == 1) return 1.0;
  return kSqrt2 * std::cos((i - 1) * kPi * x);
}

void eigenfunction_column(const SpectralBasis& basis, double x, double* out,
                          int count) {
  const int m = count < 0 ? basis.n_trunc : count;
  if (m > basis.n_trunc)
    throw std::invalid_argument("eigenfunction_column: count exceeds n_trunc");
  if (m < 1) return;
  out[0] = 1.0;
  if (m == 1) return;
  const double c1 = std::cos(kPi * x);
  out[1] = kSqrt2 * c1;
  if (m == 2) return;
  // cos(kθ) recurrence on the √2-scaled values; the scale factor is common.
  const double two_c1 = 2.0 * c1;
  double prev = kSqrt2;  // √2·cos(0)
  double cur = out[1];
  for (int k = 2; k < m; ++k) {
    double next = two_c1 * cur - prev;
    out[k] = next;
    prev = cur;
    cur = next;
  }
}

Eigen::MatrixXd feature_matrix(const SpectralBasis& basis,
                               const Eigen::VectorXd& xs) {
  const int n = static_cast<int>(xs.size());
  Eigen::MatrixXd phi(basis.n_trunc, n);
  for (int l = 0; l < n; ++l) eigenfunction_column(basis, xs[l], phi.col(l).data());
  return phi;
}

EmbeddingConstant embedding_constant(const SpectralBasis& basis, double alpha,
                                     int grid_size) {
  if (!(alpha > basis.p))
    throw std::domain_error(
        "embedding_constant: requires alpha > p (series diverges otherwise)");
  if (grid_size < 2)
    throw std::invalid_argument("embedding_constant: grid_size must be >= 2");

  Eigen::VectorXd mu_alpha(basis.n_trunc);
  double analytic_sq = 1.0;
  for (int i = 1; i <= basis.n_trunc; ++i) {
    mu_alpha[i - 1] = std::pow(static_cast<double>(i), -alpha / basis.p);
    if (i >= 2) analytic_sq += 2.0 * mu_alpha[i - 1];
  }

  Eigen::VectorXd col(basis.n_trunc);
  double grid_sq = 0.0;
  for (int g = 0; g < grid_size; ++g) {
    double x = static_cast<double>(g) / (grid_size - 1);
    eigenfunction_column(basis, x, col.data());
    double s = 0.0;
    for (int i = 0; i < basis.n_trunc; ++i) s += mu_alpha[i] * col[i] * col[i];
    if (s > grid_sq) grid_sq = s;
  }
  return {std::sqrt(grid_sq), std::sqrt(analytic_sq)};
}

double effective_dimension(const SpectralBasis& basis, double lambda) {
  if (!(lambda > 0.0))
    throw std::domain_error("effective_dimension: lambda must be > 0");
  double s = 0.0;
  for (int i = 0; i < basis.n_trunc; ++i)
    s += basis.mu[i] / (basis.mu[i] + lambda);
  return s;
}

double effective_dimension_constant(const SpectralBasis& basis,
                                    int grid_size) {
  if (grid_size < 2)
    throw std::invalid_argument(
        "effective_dimension_constant: grid_size must be >= 2");
  const double lo = std::log(1e-6), hi = std::log(1.0);
  double sup = 0.0;
  for (int g = 0; g < grid_size; ++g) {
    double lam = std::exp(lo + (hi - lo) * g / (grid_size - 1));
    double v = effective_dimension(basis, lam) * std::pow(lam, basis.p);
    if (v > sup) sup = v;
  }
  return sup * (1.0 + 1e-4);
}

}  // namespace cme
