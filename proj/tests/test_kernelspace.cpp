#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cme/kernel.hpp"
#include "cme/quadrature.hpp"
#include "cme/spectral_basis.hpp"

#include "oracles.hpp"

using namespace cme;

TEST_CASE("eigenfunction values at pinned points") {
  SpectralBasis basis = SpectralBasis::make(0.5, 8);
  CHECK(eigenfunction_eval(basis, 1, 0.37) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eigenfunction_eval(basis, 2, 0.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  // e_3(0.25) = sqrt(2) cos(pi/2) = 0
  CHECK(std::abs(eigenfunction_eval(basis, 3, 0.25)) < 1e-15);
}

TEST_CASE("eigenfunction column matches per-index evaluation") {
  SpectralBasis basis = SpectralBasis::make(0.4, 64);
  std::vector<double> col(64);
  for (double x : {0.0, 0.123, 0.5, 0.987, 1.0}) {
    eigenfunction_column(basis, x, col.data());
    for (int i = 1; i <= 64; ++i)
      CHECK(col[static_cast<size_t>(i - 1)] ==
            doctest::Approx(eigenfunction_eval(basis, i, x)).epsilon(1e-12));
    // prefix fills only the requested rows
    std::vector<double> head(3, -7.0);
    eigenfunction_column(basis, x, head.data(), 3);
    for (int i = 0; i < 3; ++i)
      CHECK(head[static_cast<size_t>(i)] == doctest::Approx(col[static_cast<size_t>(i)]));
  }
  CHECK_THROWS_AS(eigenfunction_column(basis, 0.5, col.data(), 65),
                  std::invalid_argument);
}

TEST_CASE("eigenfunctions are orthonormal under 512-node quadrature") {
  SpectralBasis basis = SpectralBasis::make(0.5, 16);
  for (int i = 1; i <= 16; ++i)
    for (int j = i; j <= 16; ++j) {
      double ip = oracle::integrate([&](double x) {
        return eigenfunction_eval(basis, i, x) * eigenfunction_eval(basis, j, x);
      });
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("designed kernel values at pinned points") {
  SpectralBasis basis = SpectralBasis::make(0.5, 3);
  Kernel k = Kernel::designed(basis);
  CHECK(kernel_eval(k, 0.0, 0.0) ==
        doctest::Approx(1.0 + 2.0 / 4.0 + 2.0 / 9.0).epsilon(1e-14));
  CHECK(kernel_eval(k, 0.0, 0.5) ==
        doctest::Approx(1.0 - 2.0 / 9.0).epsilon(1e-14));
  CHECK(kernel_eval(k, 0.5, 0.5) ==
        doctest::Approx(1.0 + 2.0 / 9.0).epsilon(1e-14));
  // kappa^2 is attained at x = 0
  CHECK(k.kappa_sq == doctest::Approx(kernel_eval(k, 0.0, 0.0)).epsilon(1e-14));
}

TEST_CASE("gaussian kernel is unit on the diagonal") {
  Kernel k = Kernel::gaussian(1.0);
  CHECK(kernel_eval(k, 0.4, 0.4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k.kappa_sq == doctest::Approx(1.0).epsilon(1e-15));
  // atoms +-1 at bandwidth 1: k(-1, 1) = e^{-2}
  CHECK(kernel_eval(k, -1.0, 1.0) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("gram matrices at pinned points") {
  Kernel g = Kernel::gaussian(1.0);
  Eigen::VectorXd one(1);
  one << 0.2;
  GramMatrix gm = gram(g, one);
  CHECK(gm.entries(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  SpectralBasis basis = SpectralBasis::make(0.5, 3);
  Kernel d = Kernel::designed(basis);
  Eigen::VectorXd xs(2);
  xs << 0.0, 0.5;
  GramMatrix dm = gram(d, xs);
  CHECK(dm.entries(0, 0) == doctest::Approx(1.7222222222222).epsilon(1e-12));
  CHECK(dm.entries(0, 1) == doctest::Approx(0.7777777777778).epsilon(1e-12));
  CHECK(dm.entries(1, 0) == doctest::Approx(dm.entries(0, 1)).epsilon(1e-15));
  CHECK(dm.entries(1, 1) == doctest::Approx(1.2222222222222).epsilon(1e-12));
}

TEST_CASE("designed gram equals the truncated feature-map gram") {
  SpectralBasis basis = SpectralBasis::make(0.5, 64);
  Kernel d = Kernel::designed(basis);
  Eigen::VectorXd xs(7);
  xs << 0.0, 0.1, 0.31, 0.5, 0.62, 0.9, 1.0;
  GramMatrix gm = gram(d, xs);
  Eigen::MatrixXd phi = feature_matrix(basis, xs);
  Eigen::MatrixXd ref = phi.transpose() * basis.mu.asDiagonal() * phi;
  CHECK((gm.entries - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("embedding constant: analytic value, grid bound, domain guard") {
  SpectralBasis two = SpectralBasis::make(0.5, 2);
  EmbeddingConstant e2 = embedding_constant(two, 1.0);
  CHECK(e2.a_analytic * e2.a_analytic == doctest::Approx(1.5).epsilon(1e-14));

  SpectralBasis big = SpectralBasis::make(0.5, 512);
  EmbeddingConstant eb = embedding_constant(big, 0.55);
  CHECK(eb.a_grid <= eb.a_analytic * (1.0 + 1e-12));
  // frozen series value 1 + 2 sum_{i=2}^{512} i^{-1.1}
  CHECK(eb.a_analytic * eb.a_analytic ==
        doctest::Approx(9.45220858353248).epsilon(1e-12));
  EmbeddingConstant e7 = embedding_constant(SpectralBasis::make(0.3, 512), 0.7);
  CHECK(e7.a_analytic * e7.a_analytic ==
        doctest::Approx(1.82994548442944).epsilon(1e-12));

  CHECK_THROWS_AS(embedding_constant(big, 0.4), std::domain_error);
}

TEST_CASE("embedding realization: weighted series bounded by A^2 lambda^{-alpha}") {
  SpectralBasis basis = SpectralBasis::make(0.5, 256);
  double alpha = 0.55;
  EmbeddingConstant emb = embedding_constant(basis, alpha);
  double a_sq = emb.a_analytic * emb.a_analytic;
  std::vector<double> col(256);
  for (double lambda : oracle::log_grid(1e-6, 1.0, 25)) {
    for (double x : {0.0, 0.2, 0.411, 0.77, 1.0}) {
      eigenfunction_column(basis, x, col.data());
      double s = 0.0;
      for (int i = 0; i < 256; ++i)
        s += basis.mu[i] * col[static_cast<size_t>(i)] * col[static_cast<size_t>(i)] /
             (basis.mu[i] + lambda);
      CHECK(s <= a_sq * std::pow(lambda, -alpha) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("effective dimension at pinned points") {
  SpectralBasis three = SpectralBasis::make(0.5, 3);
  CHECK(effective_dimension(three, 1.0) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(effective_dimension(three, 1e12) <= three.mu.sum() / 1e12);

  SpectralBasis one = SpectralBasis::make(0.5, 1);
  CHECK(effective_dimension(one, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("effective dimension bound holds on a 10x finer grid than calibration") {
  SpectralBasis basis = SpectralBasis::make(0.5, 2048);
  double c = effective_dimension_constant(basis);
  // frozen reference for the calibration constant itself
  CHECK(c == doctest::Approx(1.53965211152524).epsilon(1e-10));
  for (double lambda : oracle::log_grid(1e-6, 1.0, 500))
    CHECK(effective_dimension(basis, lambda) <= c * std::pow(lambda, -0.5));
}

TEST_CASE("spectral basis validation") {
  CHECK_THROWS_AS(SpectralBasis::make(0.0, 8), std::domain_error);
  CHECK_THROWS_AS(SpectralBasis::make(1.5, 8), std::domain_error);
  CHECK_THROWS_AS(SpectralBasis::make(0.5, 0), std::invalid_argument);
  SpectralBasis b = SpectralBasis::make(1.0, 4);
  CHECK(b.mu[0] == doctest::Approx(1.0));
  CHECK(b.mu[3] == doctest::Approx(0.25));
}
