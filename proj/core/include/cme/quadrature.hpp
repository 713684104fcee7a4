#pragma once

#include <Eigen/Core>

namespace cme {

// Gauss-Legendre rule transplanted to [0,1].
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

QuadratureRule gauss_legendre_01(int n);

}  // namespace cme
