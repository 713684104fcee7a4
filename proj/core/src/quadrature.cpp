#include "cme/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <memory>
#include <stdexcept>

namespace cme {

QuadratureRule gauss_legendre_01(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_01: n must be >= 1");
  std::unique_ptr<gsl_integration_glfixed_table,
                  decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n)),
            &gsl_integration_glfixed_table_free);
  if (!table) throw std::runtime_error("gauss_legendre_01: table allocation failed");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double x = 0.0, w = 0.0;
    gsl_integration_glfixed_point(0.0, 1.0, static_cast<std::size_t>(k), &x, &w,
                                  table.get());
    rule.nodes[k] = x;
    rule.weights[k] = w;
  }
  return rule;
}

}  // namespace cme
