#include "cme/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace cme {

namespace {

// b(x) = D^{1/2} e(x), the scaled feature column of a single point.
Eigen::VectorXd feature_column(const SpectralBasis& basis, double x) {
  Eigen::VectorXd b(basis.n_trunc);
  eigenfunction_column(basis, x, b.data());
  b.array() *= basis.mu.array().sqrt();
  return b;
}

Eigen::VectorXd kernel_column(const CmeModel& model, double x) {
  const int n = static_cast<int>(model.xs.size());
  Eigen::VectorXd kx(n);
  if (model.kx.kind == KernelKind::designed) {
    // k(x, xs[l]) = b(xs[l])^T b(x); reuse the stored feature matrix.
    kx.noalias() = model.b_feat.transpose() * feature_column(model.kx.basis, x);
  } else {
    for (int l = 0; l < n; ++l)
      kx[l] = kernel_eval(model.kx, x, model.xs[static_cast<size_t>(l)]);
  }
  return kx;
}

}  // namespace

Eigen::VectorXd CmeModel::apply_inverse(const Eigen::VectorXd& t) const {
  if (t.size() != static_cast<Eigen::Index>(xs.size()))
    throw std::invalid_argument("apply_inverse: size mismatch");
  if (!primal) return factor.solve(t);
  // Woodbury with K = B^T B:
  // (B^T B + cI)^{-1} t = (t - B^T (B B^T + cI)^{-1} B t) / c.
  Eigen::VectorXd bt = b_feat * t;
  return (t - b_feat.transpose() * factor.solve(bt)) / ridge;
}

Eigen::VectorXd CmeModel::dual_weights(double x) const {
  if (primal) {
    // beta(x) = B^T (B B^T + cI)^{-1} b(x), algebraically equal to
    // (K + cI)^{-1} k_x.
    return b_feat.transpose() * factor.solve(feature_column(kx.basis, x));
  }
  return factor.solve(kernel_column(*this, x));
}

CmeModel fit_cme(const std::vector<double>& xs, const std::vector<double>& ys,
                 double lambda, const Kernel& kx, const Kernel& ky) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("fit_cme: xs and ys lengths differ");
  const int n = static_cast<int>(xs.size());
  if (n < 1) throw std::invalid_argument("fit_cme: need at least one sample");
  if (!(lambda > 0.0))
    throw std::domain_error("fit_cme: lambda must be positive");

  CmeModel model;
  model.xs = xs;
  model.ys = ys;
  model.lambda = lambda;
  model.kx = kx;
  model.ky = ky;
  double jitter = 1e-10 * kx.kappa_sq;
  model.ridge = static_cast<double>(n) * lambda + jitter;

  if (kx.kind == KernelKind::designed) {
    model.b_feat = feature_matrix(kx.basis, Eigen::Map<const Eigen::VectorXd>(
                                                xs.data(), n));
    model.b_feat.array().colwise() *= kx.basis.mu.array().sqrt();
  }

  // The m x m feature system and the n x n kernel system are the same
  // operator through the Woodbury identity; factor whichever is smaller.
  model.primal =
      kx.kind == KernelKind::designed && kx.basis.n_trunc <= n;
  if (model.primal) {
    const int m = kx.basis.n_trunc;
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m, m);
    sys.selfadjointView<Eigen::Lower>().rankUpdate(model.b_feat);
    sys = sys.selfadjointView<Eigen::Lower>();
    sys.diagonal().array() += model.ridge;
    model.factor.compute(sys);
  } else {
    Eigen::MatrixXd sys;
    if (kx.kind == KernelKind::designed) {
      sys = Eigen::MatrixXd::Zero(n, n);
      sys.selfadjointView<Eigen::Lower>().rankUpdate(model.b_feat.transpose());
      sys = sys.selfadjointView<Eigen::Lower>();
    } else {
      GramMatrix g = gram(kx, Eigen::Map<const Eigen::VectorXd>(xs.data(), n));
      sys = std::move(g.entries);
    }
    sys.diagonal().array() += model.ridge;
    model.factor.compute(sys);
  }
  if (model.factor.info() != Eigen::Success)
    throw std::runtime_error("fit_cme: Cholesky factorization failed");
  return model;
}

CmeModel fit_cme(const TwoPointProblem& problem, const Dataset& data,
                 double lambda) {
  CmeModel model = fit_cme(data.xs, dataset_ys(problem, data), lambda,
                           problem.kx, problem.ky);
  model.atom_idx = data.atoms;
  return model;
}

double conditional_expectation(const CmeModel& model,
                               const Eigen::VectorXd& g_values, double x) {
  if (g_values.size() != static_cast<Eigen::Index>(model.xs.size()))
    throw std::invalid_argument(
        "conditional_expectation: g_values length differs from n");
  return g_values.dot(model.dual_weights(x));
}

double pointwise_error_sq(const CmeModel& model, const TwoPointProblem& problem,
                          double x) {
  const size_t n = model.xs.size();
  std::vector<int> atoms;
  const std::vector<int>* atom_ptr = &model.atom_idx;
  if (model.atom_idx.empty()) {
    atoms.resize(n);
    for (size_t l = 0; l < n; ++l) {
      if (model.ys[l] == problem.y_minus) {
        atoms[l] = 0;
      } else if (model.ys[l] == problem.y_plus) {
        atoms[l] = 1;
      } else {
        throw std::invalid_argument(
            "pointwise_error_sq: training output is not one of the atoms");
      }
    }
    atom_ptr = &atoms;
  }

  // Collapse Fhat(x) = sum_l beta_l phi(y_{atom_l}) onto the two atoms, then
  // the error against F*(x) = w_0 phi(y-) + w_1 phi(y+) is a 2x2 quadratic
  // form d^T G2 d.
  Eigen::VectorXd beta = model.dual_weights(x);
  Eigen::Vector2d s = Eigen::Vector2d::Zero();
  for (size_t l = 0; l < n; ++l)
    s[(*atom_ptr)[l]] += beta[static_cast<Eigen::Index>(l)];

  auto [p_minus, p_plus] = conditional_probability(problem, x);
  Eigen::Vector2d d(s[0] - p_minus, s[1] - p_plus);
  double err = d.dot(problem.atom_gram * d);
  return err < 0.0 ? 0.0 : err;
}

Eigen::MatrixX2d feature_weights(const CmeModel& model) {
  if (model.kx.kind != KernelKind::designed)
    throw std::invalid_argument(
        "feature_weights: only available for the designed input kernel");
  if (model.atom_idx.empty())
    throw std::invalid_argument(
        "feature_weights: model was not fitted from a two-point problem");
  const int n = static_cast<int>(model.xs.size());
  Eigen::MatrixX2d t = Eigen::MatrixX2d::Zero(n, 2);
  for (int l = 0; l < n; ++l)
    t(l, model.atom_idx[static_cast<size_t>(l)]) = 1.0;

  const int m = model.kx.basis.n_trunc;
  Eigen::MatrixX2d w(m, 2);
  if (model.primal) {
    // B v_j = (B B^T + cI)^{-1} B t_j: exactly the feature-space ridge
    // normal equations, one solve per output direction.
    w = model.factor.solve(model.b_feat * t);
  } else {
    w = model.b_feat * model.factor.solve(t);
  }
  return w;
}

}  // namespace cme
