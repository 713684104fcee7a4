#include "cme/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cme/estimator.hpp"
#include "cme/quadrature.hpp"
#include "cme/random.hpp"

namespace cme {

namespace {

constexpr std::uint64_t kPackTag = 0x7061636b00000000ULL;   // "pack"
constexpr std::uint64_t kBernTag = 0x6265726e00000000ULL;   // "bern"
constexpr std::uint64_t kProbeTag = 0x70726f6265000000ULL;  // "probe"

int hamming(const std::vector<int>& a, const std::vector<int>& b) {
  int d = 0;
  for (size_t k = 0; k < a.size(); ++k) d += a[k] != b[k];
  return d;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

// Pairwise gamma'-weighted disagreement sum S = sum_{k: signs differ}
// mu_k^{beta - gamma'} over the active block; separation in the gamma'-norm
// is 4 eta^2 S.
double disagreement_sum(const SpectralBasis& basis, int m, double beta,
                        double gamma, const std::vector<int>& ci,
                        const std::vector<int>& cj) {
  double s = 0.0;
  for (int k = 0; k < m; ++k)
    if (ci[static_cast<size_t>(k)] != cj[static_cast<size_t>(k)])
      s += std::pow(basis.mu[m + k], beta - gamma);
  return s;
}

double member_grid_sup(const SpectralBasis& basis, const Eigen::VectorXd& a,
                       double beta, int hi) {
  std::vector<double> col(static_cast<size_t>(hi));
  double sup = 0.0;
  for (int g = 0; g < 4096; ++g) {
    double x = static_cast<double>(g) / 4095.0;
    eigenfunction_column(basis, x, col.data(), hi);
    double v = 0.0;
    for (int i = 0; i < hi; ++i)
      v += a[i] * std::pow(basis.mu[i], beta / 2.0) *
           col[static_cast<size_t>(i)];
    sup = std::max(sup, std::abs(v));
  }
  return sup;
}

}  // namespace

PackingFamily build_packing(const SpectralBasis& basis, double beta,
                            double gamma, double p, double epsilon, int m,
                            std::uint64_t seed, int max_members, int budget,
                            double B_inf) {
  if (m < 8) throw std::invalid_argument("build_packing: m must be >= 8");
  if (2 * m > basis.n_trunc)
    throw std::invalid_argument("build_packing: need 2m <= n_trunc");
  if (p != basis.p)
    throw std::invalid_argument("build_packing: p must match the basis");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("build_packing: epsilon must be positive");
  if (gamma < 0.0 || !(beta > 0.0) || beta > 2.0 || gamma >= beta)
    throw std::domain_error("build_packing: need 0 <= gamma < beta <= 2");
  if (max_members < 2)
    throw std::invalid_argument("build_packing: max_members must be >= 2");

  PackingFamily fam;
  fam.basis = basis;
  fam.m = m;
  fam.gamma = gamma;
  fam.beta = beta;
  fam.p = p;
  fam.c_constant = 1.0;

  // Greedy Gilbert-Varshamov: draw sign vectors, keep those at Hamming
  // distance >= m/4 from everything kept so far, stop at max_members or
  // after the draw budget.
  Rng rng(derive_stream(seed, kPackTag));
  const int min_dist = (m + 3) / 4;
  for (int draw = 0;
       draw < budget && static_cast<int>(fam.codewords.size()) < max_members;
       ++draw) {
    std::vector<int> cand(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) cand[static_cast<size_t>(k)] = rng.uniform_sign();
    bool keep = true;
    for (const auto& kept : fam.codewords)
      if (hamming(cand, kept) < min_dist) {
        keep = false;
        break;
      }
    if (keep) fam.codewords.push_back(std::move(cand));
  }
  const int M = static_cast<int>(fam.codewords.size());
  if (M < 2)
    throw std::runtime_error(
        "build_packing: draw budget exhausted with fewer than 2 codewords");

  // eta calibrated so the minimum pairwise gamma-separation is 4 eps exactly.
  double s_min = -1.0;
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j) {
      double s = disagreement_sum(basis, m, beta, gamma, fam.codewords[i],
                                  fam.codewords[j]);
      if (s_min < 0.0 || s < s_min) s_min = s;
    }
  if (!(s_min > 0.0))
    throw std::runtime_error("build_packing: separation calibration failed");
  double eta = std::sqrt(epsilon / s_min);

  // Sup-norm certificate: if any member exceeds B_inf on the grid, shrink
  // eta (separation scales as eta^2, so eps shrinks quadratically).
  auto make_member = [&](int idx, double amp) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(basis.n_trunc);
    for (int k = 0; k < m; ++k)
      a[m + k] = amp * fam.codewords[static_cast<size_t>(idx)][static_cast<size_t>(k)];
    return a;
  };
  double worst_sup = 0.0;
  for (int i = 0; i < M; ++i)
    worst_sup = std::max(
        worst_sup, member_grid_sup(basis, make_member(i, eta), beta, 2 * m));
  double realized_eps = epsilon;
  if (worst_sup > B_inf) {
    double shrink = B_inf / worst_sup;
    eta *= shrink;
    realized_eps = epsilon * shrink * shrink;
  }
  fam.eta = eta;
  fam.epsilon = realized_eps;
  fam.members.reserve(static_cast<size_t>(M));
  for (int i = 0; i < M; ++i) fam.members.push_back(make_member(i, eta));

  // Verify both packing inequalities before returning: min gamma-separation
  // equals 4 eps (up to roundoff) and every pair keeps the L2 proximity
  // 32 C^gamma eps m^{-gamma/p} with the construction's C = 1.
  double sep_min = -1.0;
  double l2_max = 0.0;
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j) {
      double sep = 4.0 * eta * eta *
                   disagreement_sum(basis, m, beta, gamma, fam.codewords[i],
                                    fam.codewords[j]);
      double l2 = 4.0 * eta * eta *
                  disagreement_sum(basis, m, beta, 0.0, fam.codewords[i],
                                   fam.codewords[j]);
      if (sep_min < 0.0 || sep < sep_min) sep_min = sep;
      l2_max = std::max(l2_max, l2);
    }
  double target = 4.0 * realized_eps;
  if (std::abs(sep_min - target) > 1e-9 * target)
    throw std::runtime_error("build_packing: separation calibration failed");
  double l2_bound = 32.0 * std::pow(fam.c_constant, gamma) * realized_eps *
                    std::pow(static_cast<double>(m), -gamma / p);
  if (l2_max > l2_bound)
    throw std::runtime_error(
        "build_packing: L2 proximity inequality failed; family too spread");
  return fam;
}

std::vector<TwoPointProblem> adversarial_family(const PackingFamily& packing,
                                                const TwoPointProblem& tmpl) {
  std::vector<TwoPointProblem> out;
  out.reserve(packing.members.size());
  for (const auto& a : packing.members) {
    double sup = member_grid_sup(packing.basis, a, packing.beta, 2 * packing.m);
    if (sup > tmpl.f.B_inf)
      throw std::runtime_error(
          "adversarial_family: member sup-norm exceeds the template B_inf");
    SourceFunction f;
    f.basis = packing.basis;
    f.beta = packing.beta;
    f.coeffs = a;
    f.B_bar = a.norm();
    f.B_inf = tmpl.f.B_inf;  // shared level => shared L across the family
    f.active_hi = 2 * packing.m;
    out.push_back(make_two_point_problem(f, tmpl.y_minus, tmpl.y_plus,
                                         tmpl.ky.bandwidth));
  }
  return out;
}

double kl_divergence(const TwoPointProblem& pi, const TwoPointProblem& pj,
                     int quad_nodes) {
  if (pi.y_minus != pj.y_minus || pi.y_plus != pj.y_plus || pi.L != pj.L)
    throw std::invalid_argument(
        "kl_divergence: problems must share atoms and L");
  QuadratureRule quad = gauss_legendre_01(quad_nodes);
  double kl = 0.0;
  for (int q = 0; q < quad.size(); ++q) {
    double x = quad.nodes[q];
    auto [ai, bi] = conditional_probability(pi, x);
    auto [aj, bj] = conditional_probability(pj, x);
    kl += quad.weights[q] *
          (ai * std::log(ai / aj) + bi * std::log(bi / bj));
  }
  return kl < 0.0 ? 0.0 : kl;
}

std::vector<KlReport> kl_bound_check(const PackingFamily& packing,
                                     const std::vector<TwoPointProblem>& problems,
                                     double B_inf) {
  double bound = 40.0 * B_inf * B_inf *
                 std::pow(packing.c_constant, packing.gamma) *
                 packing.epsilon *
                 std::pow(static_cast<double>(packing.m),
                          -packing.gamma / packing.p);
  std::vector<KlReport> reports;
  for (size_t i = 0; i < problems.size(); ++i)
    for (size_t j = i + 1; j < problems.size(); ++j) {
      KlReport rep;
      rep.i = static_cast<int>(i);
      rep.j = static_cast<int>(j);
      rep.kl = kl_divergence(problems[i], problems[j]);
      rep.bound = bound;
      rep.ok = rep.kl <= bound;
      reports.push_back(rep);
    }
  return reports;
}

BernsteinReport bernstein_check(const TwoPointProblem& problem, int n,
                                double tau, int trials, std::uint64_t seed) {
  if (!(tau >= 1.0))
    throw std::domain_error("bernstein_check: tau must be >= 1");
  if (trials < 500)
    throw std::invalid_argument("bernstein_check: trials must be >= 500");
  if (n < 1) throw std::invalid_argument("bernstein_check: n must be >= 1");

  // Population mean embedding of Y: only the constant part of f survives
  // integration over x, so E phi(Y) = w0 phi(y-) + w1 phi(y+) with the mean
  // weights below (f == 0 gives the fair-coin 1/2, 1/2 fixture).
  double f_bar = problem.f.coeffs.size() > 0 ? problem.f.coeffs[0] : 0.0;
  double w1 = (problem.L + f_bar) / (2.0 * problem.L);
  double w0 = 1.0 - w1;

  double kappa_y = problem.kappa_y;
  double sigma = 2.0 * kappa_y;
  double range = 2.0 * kappa_y;
  BernsteinReport rep;
  rep.n = n;
  rep.tau = tau;
  rep.trials = trials;
  rep.threshold =
      32.0 * tau * tau / n * (sigma * sigma + range * range / n);
  rep.bound = 2.0 * std::exp(-tau);

  for (int t = 0; t < trials; ++t) {
    Dataset data = sample_dataset(
        problem, n, derive_stream(seed, kBernTag, static_cast<std::uint64_t>(t)));
    int plus = 0;
    for (int a : data.atoms) plus += a;
    double q1 = static_cast<double>(plus) / n;
    Eigen::Vector2d d(1.0 - q1 - w0, q1 - w1);
    double val = d.dot(problem.atom_gram * d);
    if (val > rep.threshold) ++rep.exceed_count;
  }
  rep.fraction = static_cast<double>(rep.exceed_count) / trials;
  double slack =
      3.0 * std::sqrt(rep.bound * (1.0 - rep.bound) / trials);
  rep.ok = rep.fraction <= rep.bound + slack;
  return rep;
}

MinimaxResult minimax_probe(const std::vector<TwoPointProblem>& problems,
                            const PackingFamily& packing, const Learner& learner,
                            const std::vector<int>& ns, int replicates,
                            double gamma, double alpha, std::uint64_t seed) {
  if (problems.size() < 2)
    throw std::invalid_argument("minimax_probe: need at least two members");
  if (replicates < 1)
    throw std::invalid_argument("minimax_probe: replicates must be >= 1");

  std::vector<CoefficientMatrix> truths;
  truths.reserve(problems.size());
  for (const auto& prob : problems) truths.push_back(true_cme_coefficients(prob));

  MinimaxResult result;
  result.gamma = gamma;
  double top = std::max(alpha, packing.beta);
  result.exponent = (top - gamma) / (top + packing.p);

  // Floor achieved by any data-independent learner: the CME separation is
  // the scalar separation times |phi(y+) - phi(y-)|^2 / (2L)^2.
  const TwoPointProblem& tmpl = problems.front();
  Eigen::Vector2d u1 =
      (tmpl.atom_coords.col(1) - tmpl.atom_coords.col(0)) / (2.0 * tmpl.L);
  result.separation_floor = 4.0 * packing.epsilon * u1.squaredNorm();

  for (size_t ni = 0; ni < ns.size(); ++ni) {
    int n = ns[ni];
    MinimaxRow row;
    row.n = n;
    for (size_t i = 0; i < problems.size(); ++i) {
      std::vector<double> errs;
      for (int rep = 0; rep < replicates; ++rep) {
        std::uint64_t cell_seed = derive_stream(
            seed, kProbeTag,
            (static_cast<std::uint64_t>(i) << 40) ^
                (static_cast<std::uint64_t>(n) << 16) ^
                static_cast<std::uint64_t>(rep));
        Dataset data = sample_dataset(problems[i], n, cell_seed);
        try {
          // The learner sees the dataset and the shared template only; it is
          // never told which member generated the data.
          CoefficientMatrix est = learner(data, tmpl);
          double err =
              gamma_norm(coefficient_difference(est, truths[i]), gamma);
          errs.push_back(err * err);
        } catch (const std::exception&) {
          // learner failure: cell skipped, recorded
        }
      }
      row.member_median_err_sq.push_back(errs.empty() ? -1.0 : median(errs));
    }
    row.worst_median_err_sq = *std::max_element(
        row.member_median_err_sq.begin(), row.member_median_err_sq.end());
    result.rows.push_back(std::move(row));
  }

  // log-log slope of the worst-case risk over n (when it is positive).
  std::vector<double> lx, ly;
  for (const auto& row : result.rows)
    if (row.worst_median_err_sq > 0.0) {
      lx.push_back(std::log(static_cast<double>(row.n)));
      ly.push_back(std::log(row.worst_median_err_sq));
    }
  if (lx.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
      mx += lx[i];
      my += ly[i];
    }
    mx /= lx.size();
    my /= lx.size();
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < lx.size(); ++i) {
      sxx += (lx[i] - mx) * (lx[i] - mx);
      sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx > 0.0) {
      result.slope = sxy / sxx;
      double rss = 0.0;
      for (size_t i = 0; i < lx.size(); ++i) {
        double res = ly[i] - my - result.slope * (lx[i] - mx);
        rss += res * res;
      }
      result.slope_se = lx.size() > 2
                            ? std::sqrt(rss / (lx.size() - 2) / sxx)
                            : 0.0;
    }
  }
  return result;
}

}  // namespace cme
