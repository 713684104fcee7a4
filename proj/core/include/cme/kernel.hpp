#pragma once

#include <Eigen/Core>

#include "cme/spectral_basis.hpp"

namespace cme {

enum class KernelKind { designed, gaussian, laplacian, matern };

// Input/output kernels. The designed kind carries its spectral basis and is
// exactly k(x,x') = Σ μ_i e_i(x)e_i(x'); standard kinds are translation
// invariant with k(x,x) = 1.
struct Kernel {
  KernelKind kind = KernelKind::gaussian;
  SpectralBasis basis;      // designed only
  double bandwidth = 1.0;   // gaussian / laplacian / matern
  double smoothness = 1.5;  // matern: one of 0.5, 1.5, 2.5
  double kappa_sq = 1.0;    // uniform bound on k(x,x); attained at x=0 when designed

  static Kernel designed(SpectralBasis basis);
  static Kernel gaussian(double bandwidth);
  static Kernel laplacian(double bandwidth);
  static Kernel matern(double smoothness, double bandwidth);
};

double kernel_eval(const Kernel& k, double x, double x2);

struct GramMatrix {
  Eigen::MatrixXd entries;
  double jitter = 0.0;  // diagonal regularization used at factorization time
};

// entries[l][m] = k(xs[l], xs[m]); jitter = 1e-10·kappa_sq (added to the
// diagonal only when the matrix is factorized, not stored into entries).
// The designed kind assembles via the feature map, ΦᵀDΦ, which equals the
// entrywise kernel sums identically.
GramMatrix gram(const Kernel& k, const Eigen::VectorXd& xs);

}  // namespace cme
