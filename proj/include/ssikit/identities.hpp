#pragma once

#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "ssikit/criteria.hpp"

namespace ssikit {

struct IdentityCheck {
  int id = 0;
  std::string name;
  std::string params;  ///< e.g. "j=3/2" or "d=3,N=2"
  std::string description;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct IdentityOptions {
  std::size_t samples = 100;
  std::size_t remixings = 50;
  std::uint64_t seed = 2024;
  double exact_tol = 1e-10;
  double variational_tol = 1e-9;
  std::size_t max_dim = 256;  ///< largest many-body dimension used by checks 13-18
};

namespace detail {

inline std::string spin_label(Spin s) {
  return s.twice() % 2 == 0 ? "j=" + std::to_string(s.twice() / 2) : "j=" + std::to_string(s.twice()) + "/2";
}

inline IdentityCheck make_check(int id, std::string name, std::string params, std::string description,
                                double deviation, double tolerance) {
  return {id, std::move(name), std::move(params), std::move(description), deviation, tolerance,
          deviation <= tolerance};
}

inline Matrix random_single_density(std::size_t d, Rng& rng) {
  return random_density(Layout(1, d), rng).matrix();
}

inline double purity(const Matrix& rho) { return rho.cwiseProduct(rho.transpose()).sum().real(); }

inline bool fits(std::size_t d, std::size_t n, std::size_t max_dim) {
  std::size_t dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    dim *= d;
    if (dim > max_dim) return false;
  }
  return true;
}

}  // namespace detail

/// Angular momentum identities for one spin (checks 1-5).
inline std::vector<IdentityCheck> spin_identities(Spin spin, const IdentityOptions& opt = {}) {
  std::vector<IdentityCheck> out;
  const double j = spin.value();
  const auto set = spin_matrices(spin);
  const auto d = static_cast<Eigen::Index>(spin.dim());
  const Operator id = Operator::Identity(d, d);
  const std::string p = detail::spin_label(spin);
  const auto& [jx, jy, jz] = std::tie(set.ops[0], set.ops[1], set.ops[2]);

  out.push_back(detail::make_check(1, "casimir", p, "j_x^2 + j_y^2 + j_z^2 = j(j+1) I",
                                   relative_deviation(jx * jx + jy * jy + jz * jz, j * (j + 1.0) * id),
                                   opt.exact_tol));

  double gram = 0.0;
  const double c = j * (j + 1.0) * (2.0 * j + 1.0) / 3.0;
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t l = 0; l < 3; ++l) {
      gram = std::max(gram, std::abs((set.ops[k] * set.ops[l]).trace() - cplx(k == l ? c : 0.0)));
    }
  }
  out.push_back(detail::make_check(2, "spin-orthogonality", p, "Tr(j_k j_l) = delta_kl j(j+1)(2j+1)/3", gram,
                                   opt.exact_tol));

  out.push_back(detail::make_check(3, "spin-k-bound", p, "max over pure states of sum_k <j_k>^2 = j^2",
                                   std::abs(estimate_k(set, opt.seed) - j * j), opt.variational_tol));

  Operator pair_sq = Operator::Zero(d * d, d * d);
  Operator pair_dot = Operator::Zero(d * d, d * d);
  for (const auto& a : set.ops) {
    const Operator t = kron(a, id) + kron(id, a);
    pair_sq += t * t;
    pair_dot += kron(a, a);
  }
  out.push_back(detail::make_check(4, "two-spin-total", p,
                                   "max eig of sum_l (j_l x 1 + 1 x j_l)^2 = 2j(2j+1)",
                                   std::abs(max_eigenvalue(pair_sq) - 2.0 * j * (2.0 * j + 1.0)),
                                   opt.variational_tol));
  out.push_back(detail::make_check(5, "two-spin-correlation", p, "max eig of sum_l j_l x j_l = j^2",
                                   std::abs(max_eigenvalue(pair_dot) - j * j), opt.variational_tol));
  return out;
}

/// Local-orthogonal-observable and SU(d) identities for one local dimension (checks 6-18).
inline std::vector<IdentityCheck> dimension_identities(std::size_t d, const IdentityOptions& opt = {}) {
  std::vector<IdentityCheck> out;
  const std::string p = "d=" + std::to_string(d);
  const double dd = static_cast<double>(d);
  const auto n = static_cast<Eigen::Index>(d);
  const Operator id = Operator::Identity(n, n);
  const Operator id2 = Operator::Identity(n * n, n * n);
  const Operator flip = flip_operator(d);
  const auto loo = pairwise_loo_set(d);
  const auto gm = gellmann_set(d);
  Rng rng(opt.seed + 1000 * d);

  Operator loo_sq = Operator::Zero(n, n);
  Operator loo_pair = Operator::Zero(n * n, n * n);
  for (const auto& a : loo.ops) {
    loo_sq += a * a;
    loo_pair += kron(a, a);
  }
  out.push_back(detail::make_check(6, "loo-square-sum", p, "sum_k lambda_k^2 = d I",
                                   relative_deviation(loo_sq, dd * id), opt.exact_tol));

  double purity_dev = 0.0;
  double sud_purity_dev = 0.0;
  for (std::size_t s = 0; s < opt.samples; ++s) {
    const Matrix rho = detail::random_single_density(d, rng);
    double loo_sum = 0.0;
    for (const auto& a : loo.ops) loo_sum += std::pow(expectation(rho, a), 2);
    double gm_sum = 0.0;
    for (const auto& g : gm.ops) gm_sum += std::pow(expectation(rho, g), 2);
    purity_dev = std::max(purity_dev, std::abs(loo_sum - detail::purity(rho)));
    sud_purity_dev = std::max(sud_purity_dev, std::abs(gm_sum - 2.0 * (detail::purity(rho) - 1.0 / dd)));
  }
  out.push_back(detail::make_check(7, "loo-purity", p, "sum_k <lambda_k>^2 = Tr(rho^2)", purity_dev, opt.exact_tol));
  out.push_back(detail::make_check(8, "loo-flip", p, "sum_k lambda_k x lambda_k = F",
                                   relative_deviation(loo_pair, flip), opt.exact_tol));

  Operator gm_sq = Operator::Zero(n, n);
  Operator gm_pair = Operator::Zero(n * n, n * n);
  for (const auto& g : gm.ops) {
    gm_sq += g * g;
    gm_pair += kron(g, g);
  }
  out.push_back(detail::make_check(9, "sud-square-sum", p, "sum_k g_k^2 = 2(d^2-1)/d I",
                                   relative_deviation(gm_sq, 2.0 * (dd * dd - 1.0) / dd * id), opt.exact_tol));
  out.push_back(detail::make_check(10, "sud-purity", p, "sum_k <g_k>^2 = 2(Tr rho^2 - 1/d)", sud_purity_dev,
                                   opt.exact_tol));
  out.push_back(detail::make_check(11, "sud-flip", p, "sum_k g_k x g_k = 2(F - I/d)",
                                   relative_deviation(gm_pair, 2.0 * (flip - id2 / dd)), opt.exact_tol));

  {
    const auto proj = sym_antisym_projectors(Layout(2, d));
    double dev = std::max(
        relative_deviation(proj.symmetric * gm_pair * proj.symmetric, 2.0 * (1.0 - 1.0 / dd) * proj.symmetric),
        relative_deviation(proj.antisymmetric * gm_pair * proj.antisymmetric,
                           -2.0 * (1.0 + 1.0 / dd) * proj.antisymmetric));
    for (std::size_t s = 0; s < opt.samples; ++s) {
      Vector v(n * n);
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
      const Vector vs = (proj.symmetric * v).normalized();
      const Vector va = (proj.antisymmetric * v).normalized();
      dev = std::max(dev, std::abs(vs.dot(gm_pair * vs).real() - 2.0 * (1.0 - 1.0 / dd)));
      dev = std::max(dev, std::abs(va.dot(gm_pair * va).real() + 2.0 * (1.0 + 1.0 / dd)));
    }
    out.push_back(detail::make_check(12, "sud-pair-symmetry", p,
                                     "<sum g_k x g_k> = 2(1-1/d) on symmetric, -2(1+1/d) on antisymmetric pairs",
                                     dev, opt.variational_tol));
  }

  for (std::size_t np = 2; np <= 3 && detail::fits(d, np, opt.max_dim); ++np) {
    const Layout layout(np, d);
    const double nn = static_cast<double>(np);
    const std::string pn = p + ",N=" + std::to_string(np);
    const auto collective = collectivize(gm, layout);
    const Operator direct = sum_of_squares(collective);
    out.push_back(detail::make_check(13, "sud-casimir-flips", pn,
                                     "sum_k G_k^2 = 2N(d^2-1)/d I + sum_{m!=n} 2(F_mn - I/d)",
                                     relative_deviation(direct, sud_sum_of_squares_from_flips(layout)),
                                     opt.exact_tol));

    const auto eig = herm_eig(direct);
    const double sym_max = 2.0 * nn / dd * (dd - 1.0) * (dd + nn);
    double dev15 = std::abs(eig.values(eig.values.size() - 1) - sym_max);
    const Operator sym = symmetrizer(layout);
    for (std::size_t s = 0; s < opt.samples; ++s) {
      const auto psi = random_symmetric_pure(layout, rng, sym);
      dev15 = std::max(dev15, std::abs(expectation(psi, direct) - sym_max));
    }
    out.push_back(detail::make_check(15, "sud-symmetric-maximum", pn,
                                     "max sum_k <G_k^2> = (2N/d)(d-1)(d+N), attained on symmetric states", dev15,
                                     opt.variational_tol));

    const double bound16 = nn * nn * 2.0 * (1.0 - 1.0 / dd);
    double dev16 = 0.0;
    for (std::size_t s = 0; s < opt.samples; ++s) {
      const auto rho = random_density(layout, rng);
      const auto t = moment_table(rho, collective);
      double len = 0.0;
      for (const double v : t.mean) len += v * v;
      dev16 = std::max(dev16, len - bound16);
      const auto psi = identical_product(detail::random_unit_vector(n, rng), np);
      const auto tp = moment_table(psi, collective);
      double lenp = 0.0;
      for (const double v : tp.mean) lenp += v * v;
      dev16 = std::max(dev16, std::abs(lenp - bound16));
    }
    out.push_back(detail::make_check(16, "sud-mean-length", pn,
                                     "|<G>|^2 <= 2N^2(1-1/d), with equality on psi^(x N)", dev16,
                                     opt.variational_tol));

    const auto rho = random_density(layout, rng);
    const double reference = moment_table(rho, collective).variance_sum();
    double dev17 = 0.0;
    for (std::size_t s = 0; s < opt.remixings; ++s) {
      const auto m = static_cast<Eigen::Index>(gm.size());
      RealMatrix g(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index k = 0; k < m; ++k) g(i, k) = rng.normal();
      }
      const RealMatrix o = Eigen::HouseholderQR<RealMatrix>(g).householderQ();
      const auto remixed = collectivize(remixed_set(gm, o, Matrix::Identity(n, n)), layout);
      dev17 = std::max(dev17, std::abs(moment_table(rho, remixed).variance_sum() - reference));
    }
    out.push_back(detail::make_check(17, "variance-sum-invariance", pn,
                                     "sum_k Var(G_k) unchanged by orthogonal remixing of the generators", dev17,
                                     opt.variational_tol));
  }

  for (std::size_t np = 2; np <= d && detail::fits(d, np, opt.max_dim); ++np) {
    const Layout layout(np, d);
    const double nn = static_cast<double>(np);
    const double lowest = min_eigenvalue(sum_of_squares(collectivize(gm, layout)));
    out.push_back(detail::make_check(14, "sud-antisymmetric-minimum", p + ",N=" + std::to_string(np),
                                     "min sum_k <G_k^2> = (2N/d)(d+1)(d-N) for N <= d",
                                     std::abs(lowest - 2.0 * nn / dd * (dd + 1.0) * (dd - nn)),
                                     opt.variational_tol));
  }

  if (detail::fits(d, d, opt.max_dim)) {
    const Layout layout(d, d);
    const auto singlet = sud_singlet(d, d);
    const auto collective = collectivize(gm, layout);
    const auto t = moment_table(singlet, collective);
    double second = 0.0;
    for (const double v : t.raw_second) second += v;
    double dev = std::max(std::abs(second), std::abs(t.variance_sum()));
    for (std::size_t s = 0; s < opt.samples; ++s) {
      Matrix b(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < n; ++k) b(i, k) = rng.complex_normal();
      }
      b = 0.5 * (b + b.adjoint());
      b -= b.trace() / dd * id;
      ObservableSet single{"traceless", d, {b}, 1.0, 1.0};
      const auto tb = moment_table(singlet, collectivize(single, layout));
      dev = std::max({dev, std::abs(tb.mean[0]), std::abs(tb.variance(0))});
    }
    out.push_back(detail::make_check(18, "singlet-zero-variance", p + ",N=" + std::to_string(d),
                                     "sum_k <G_k^2> = 0 implies sum_k Var(G_k) = 0 and <B> = Var(B) = 0 for traceless B",
                                     dev, 1e-8));
  }
  return out;
}

/// Runs checks 1-5 for every spin and 6-18 for every local dimension; output
/// is ordered by check id, then by parameters in input order.
inline std::vector<IdentityCheck> run_identities(const std::vector<std::size_t>& dims, const std::vector<Spin>& spins,
                                                 const IdentityOptions& opt = {}) {
  std::vector<IdentityCheck> all;
  for (const Spin s : spins) {
    auto v = spin_identities(s, opt);
    all.insert(all.end(), v.begin(), v.end());
  }
  for (const std::size_t d : dims) {
    auto v = dimension_identities(d, opt);
    all.insert(all.end(), v.begin(), v.end());
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return all;
}

}  // namespace ssikit
