#include "cme/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace cme {

Kernel Kernel::designed(SpectralBasis basis) {
  Kernel k;
  k.kind = KernelKind::designed;
  // sup_x k(x,x) = 1 + 2·Σ_{i≥2} μ_i, attained at x = 0 where e_i(0)² = 2.
  double s = basis.mu[0];
  for (int i = 1; i < basis.n_trunc; ++i) s += 2.0 * basis.mu[i];
  k.kappa_sq = s;
  k.basis = std::move(basis);
  return k;
}

Kernel Kernel::gaussian(double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::domain_error("Kernel::gaussian: bandwidth must be > 0");
  Kernel k;
  k.kind = KernelKind::gaussian;
  k.bandwidth = bandwidth;
  k.kappa_sq = 1.0;
  return k;
}

Kernel Kernel::laplacian(double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::domain_error("Kernel::laplacian: bandwidth must be > 0");
  Kernel k;
  k.kind = KernelKind::laplacian;
  k.bandwidth = bandwidth;
  k.kappa_sq = 1.0;
  return k;
}

Kernel Kernel::matern(double smoothness, double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::domain_error("Kernel::matern: bandwidth must be > 0");
  if (smoothness != 0.5 && smoothness != 1.5 && smoothness != 2.5)
    throw std::domain_error("Kernel::matern: smoothness must be 0.5, 1.5 or 2.5");
  Kernel k;
  k.kind = KernelKind::matern;
  k.bandwidth = bandwidth;
  k.smoothness = smoothness;
  k.kappa_sq = 1.0;
  return k;
}

double kernel_eval(const Kernel& k, double x, double x2) {
  switch (k.kind) {
    case KernelKind::designed: {
      const int m = k.basis.n_trunc;
      Eigen::VectorXd ex(m), ey(m);
      eigenfunction_column(k.basis, x, ex.data());
      eigenfunction_column(k.basis, x2, ey.data());
      double s = 0.0;
      for (int i = 0; i < m; ++i) s += k.basis.mu[i] * ex[i] * ey[i];
      return s;
    }
    case KernelKind::gaussian: {
      double d = x - x2;
      return std::exp(-d * d / (2.0 * k.bandwidth * k.bandwidth));
    }
    case KernelKind::laplacian:
      return std::exp(-std::abs(x - x2) / k.bandwidth);
    case KernelKind::matern: {
      double d = std::abs(x - x2) / k.bandwidth;
      if (k.smoothness == 0.5) return std::exp(-d);
      if (k.smoothness == 1.5) {
        double t = std::sqrt(3.0) * d;
        return (1.0 + t) * std::exp(-t);
      }
      double t = std::sqrt(5.0) * d;
      return (1.0 + t + t * t / 3.0) * std::exp(-t);
    }
  }
  throw std::logic_error("kernel_eval: unknown kernel kind");
}

GramMatrix gram(const Kernel& k, const Eigen::VectorXd& xs) {
  const int n = static_cast<int>(xs.size());
  if (n == 0) throw std::invalid_argument("gram: empty point sequence");
  GramMatrix g;
  g.jitter = 1e-10 * k.kappa_sq;
  if (k.kind == KernelKind::designed) {
    Eigen::MatrixXd b = feature_matrix(k.basis, xs);
    b.array().colwise() *= k.basis.mu.array().sqrt();
    g.entries.noalias() = b.transpose() * b;
    // enforce exact symmetry against GEMM rounding
    g.entries = 0.5 * (g.entries + g.entries.transpose()).eval();
    return g;
  }
  g.entries.resize(n, n);
  for (int l = 0; l < n; ++l) {
    for (int m = l; m < n; ++m) {
      double v = kernel_eval(k, xs[l], xs[m]);
      g.entries(l, m) = v;
      g.entries(m, l) = v;
    }
  }
  return g;
}

}  // namespace cme
