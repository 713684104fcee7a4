#include "cme/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

#include "cme/csv.hpp"
#include "cme/random.hpp"

namespace cme {

namespace {

constexpr std::uint64_t kSourceTag = 0x736f757263650000ULL;  // "source"
constexpr std::uint64_t kSampleTag = 0x73616d706c650000ULL;  // "sample"

// Grid sup of |Σ_i w_i e_i(x)| over 4096 equispaced points including both
// endpoints (the sup of an all-positive cosine mix sits exactly at x = 0).
double grid_sup(const SpectralBasis& basis, const Eigen::VectorXd& w, int hi) {
  std::vector<double> col(static_cast<size_t>(hi));
  double sup = 0.0;
  const int grid = 4096;
  for (int g = 0; g < grid; ++g) {
    double x = static_cast<double>(g) / (grid - 1);
    eigenfunction_column(basis, x, col.data(), hi);
    double v = 0.0;
    for (int i = 0; i < hi; ++i) v += w[i] * col[static_cast<size_t>(i)];
    sup = std::max(sup, std::abs(v));
  }
  return sup;
}

}  // namespace

SourceFunction make_source(const SpectralBasis& basis, double beta,
                           double B_bar, double B_inf, int band_lo, int band_hi,
                           std::uint64_t seed) {
  if (!(beta > 0.0) || beta > 2.0)
    throw std::domain_error("make_source: beta must lie in (0, 2]");
  if (band_lo < 2 || band_hi > basis.n_trunc)
    throw std::invalid_argument("make_source: band must lie within 2..n_trunc");
  if (band_lo > band_hi)
    throw std::domain_error("make_source: empty coefficient band");
  if (!(B_bar > 0.0) || !(B_inf > 0.0))
    throw std::domain_error("make_source: B_bar and B_inf must be positive");

  SourceFunction f;
  f.basis = basis;
  f.beta = beta;
  f.coeffs = Eigen::VectorXd::Zero(basis.n_trunc);
  f.active_hi = band_hi;

  // a_i = Z i^{-1/2} / log(i+1) with random signs; the i^{-1/2} envelope puts
  // the coefficients right at the edge of ℓ₂, so the smoothness is sharp at
  // beta (no hidden extra decay for rate experiments to exploit).
  Rng rng(derive_stream(seed, kSourceTag));
  double norm_sq = 0.0;
  for (int i = band_lo; i <= band_hi; ++i) {
    double envelope = std::pow(i, -0.5) / std::log(i + 1.0);
    f.coeffs[i - 1] = envelope * rng.uniform_sign();
    norm_sq += envelope * envelope;
  }
  f.coeffs *= B_bar / std::sqrt(norm_sq);
  if (f.coeffs[band_lo - 1] < 0.0) f.coeffs = -f.coeffs;
  f.B_bar = B_bar;
  f.B_inf = B_inf;

  Eigen::VectorXd w(band_hi);
  for (int i = 0; i < band_hi; ++i)
    w[i] = f.coeffs[i] * std::pow(basis.mu[i], beta / 2.0);
  double sup = grid_sup(basis, w, band_hi);
  if (sup > B_inf) {
    double scale = B_inf / sup;
    f.coeffs *= scale;
    f.B_bar = B_bar * scale;
  }
  return f;
}

SourceFunction make_constant_source(const SpectralBasis& basis, double beta,
                                    double c, double B_inf) {
  if (!(beta > 0.0) || beta > 2.0)
    throw std::domain_error("make_constant_source: beta must lie in (0, 2]");
  if (!(B_inf >= std::abs(c)) || !(B_inf > 0.0))
    throw std::domain_error("make_constant_source: need B_inf >= |c| and > 0");
  SourceFunction f;
  f.basis = basis;
  f.beta = beta;
  f.coeffs = Eigen::VectorXd::Zero(basis.n_trunc);
  f.coeffs[0] = c;  // mu_1 = 1, so the beta-norm is |c| for every beta
  f.B_bar = std::abs(c);
  f.B_inf = B_inf;
  f.active_hi = 1;
  return f;
}

double eval_source(const SourceFunction& f, double x) {
  if (f.active_hi <= 0) return 0.0;
  std::vector<double> col(static_cast<size_t>(f.active_hi));
  eigenfunction_column(f.basis, x, col.data(), f.active_hi);
  double v = 0.0;
  for (int i = 0; i < f.active_hi; ++i)
    v += f.coeffs[i] * std::pow(f.basis.mu[i], f.beta / 2.0) *
         col[static_cast<size_t>(i)];
  return v;
}

TwoPointProblem make_two_point_problem(const SourceFunction& f, double y_minus,
                                       double y_plus,
                                       double output_bandwidth) {
  if (y_minus == y_plus)
    throw std::invalid_argument("make_two_point_problem: atoms must differ");
  TwoPointProblem prob;
  prob.f = f;
  prob.y_minus = y_minus;
  prob.y_plus = y_plus;
  prob.L = 1.5 * f.B_inf;
  prob.kx = Kernel::designed(f.basis);
  prob.ky = Kernel::gaussian(output_bandwidth);
  prob.kappa_y = 1.0;  // gaussian: k(y,y) = 1

  prob.atom_gram(0, 0) = kernel_eval(prob.ky, y_minus, y_minus);
  prob.atom_gram(0, 1) = kernel_eval(prob.ky, y_minus, y_plus);
  prob.atom_gram(1, 0) = prob.atom_gram(0, 1);
  prob.atom_gram(1, 1) = kernel_eval(prob.ky, y_plus, y_plus);

  // T^T T = G2 with T upper triangular: column j of T holds the coordinates
  // of phi(y_j) in an orthonormal pair spanning {phi(y-), phi(y+)}.
  Eigen::LLT<Eigen::Matrix2d> llt(prob.atom_gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "make_two_point_problem: atom Gram is not positive definite");
  prob.atom_coords = llt.matrixL().transpose();
  return prob;
}

std::pair<double, double> conditional_probability(const TwoPointProblem& problem,
                                                  double x) {
  double fx = eval_source(problem.f, x);
  if (std::abs(fx) > problem.L)
    throw std::logic_error(
        "conditional_probability: |f(x)| > L, construction is broken");
  double p_plus = (problem.L + fx) / (2.0 * problem.L);
  return {1.0 - p_plus, p_plus};
}

Dataset sample_dataset(const TwoPointProblem& problem, int n,
                       std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
  Dataset data;
  data.xs.resize(static_cast<size_t>(n));
  data.atoms.resize(static_cast<size_t>(n));
  Rng rng(derive_stream(seed, kSampleTag));
  for (int l = 0; l < n; ++l) {
    double x = rng.uniform01();
    auto [p_minus, p_plus] = conditional_probability(problem, x);
    (void)p_minus;
    data.xs[static_cast<size_t>(l)] = x;
    data.atoms[static_cast<size_t>(l)] = rng.bernoulli(p_plus) ? 1 : 0;
  }
  return data;
}

std::vector<double> dataset_ys(const TwoPointProblem& problem,
                               const Dataset& data) {
  std::vector<double> ys(data.atoms.size());
  for (size_t l = 0; l < data.atoms.size(); ++l)
    ys[l] = data.atoms[l] ? problem.y_plus : problem.y_minus;
  return ys;
}

CoefficientMatrix true_cme_coefficients(const TwoPointProblem& problem) {
  // F*(x) = (1/2L)[(L - f(x)) phi(y-) + (L + f(x)) phi(y+)]
  //       = (phi(y-) + phi(y+))/2 + f(x) (phi(y+) - phi(y-))/(2L),
  // so the coefficient rows are u0 on the constant direction e_1 plus u1
  // times the coefficients of f.
  Eigen::Vector2d u0 =
      0.5 * (problem.atom_coords.col(0) + problem.atom_coords.col(1));
  Eigen::Vector2d u1 =
      (problem.atom_coords.col(1) - problem.atom_coords.col(0)) /
      (2.0 * problem.L);

  CoefficientMatrix truth = CoefficientMatrix::zero(problem.f.basis);
  truth.a.row(0) = u0.transpose();
  const SourceFunction& f = problem.f;
  for (int i = 0; i < f.active_hi; ++i) {
    double fi = f.coeffs[i] * std::pow(f.basis.mu[i], f.beta / 2.0);
    if (fi != 0.0) truth.a.row(i) += fi * u1.transpose();
  }
  return truth;
}

Eigen::Vector2d atom_feature_coords(const TwoPointProblem& problem, double a) {
  // Coordinates of phi(a) projected onto span{phi(y-), phi(y+)}: solve
  // T^T u = g0 with g0_s = k_Y(y_s, a). Exact when a is one of the atoms.
  Eigen::Vector2d g0(kernel_eval(problem.ky, problem.y_minus, a),
                     kernel_eval(problem.ky, problem.y_plus, a));
  return problem.atom_coords.transpose()
      .triangularView<Eigen::Lower>()
      .solve(g0);
}

void write_dataset_csv(const std::string& path, const Dataset& data,
                       const TwoPointProblem& problem, int replicate,
                       std::uint64_t seed) {
  (void)problem;
  CsvWriter out(path);
  out.header({"x", "y_atom", "replicate", "seed"});
  for (size_t l = 0; l < data.xs.size(); ++l) {
    out.row({g17(data.xs[l]), data.atoms[l] ? "1" : "-1",
             std::to_string(replicate), std::to_string(seed)});
  }
  out.close();
}

}  // namespace cme
