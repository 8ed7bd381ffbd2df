#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "ssikit/tensor.hpp"

namespace ssikit {

/// Spin quantum number stored as the integer 2j, so half-integers are exact.
class Spin {
 public:
  explicit Spin(int twice_j) : twice_(twice_j) {
    if (twice_ < 1) throw InputError("spin must be a positive half-integer");
  }

  static Spin from_value(double j) {
    const double twice = 2.0 * j;
    const double rounded = std::round(twice);
    if (!(j > 0.0) || std::abs(twice - rounded) > 1e-12) {
      throw InputError("spin " + std::to_string(j) + " is not a positive half-integer");
    }
    return Spin(static_cast<int>(rounded));
  }

  static Spin from_local_dim(std::size_t d) { return Spin(static_cast<int>(d) - 1); }

  int twice() const { return twice_; }
  double value() const { return 0.5 * twice_; }
  std::size_t dim() const { return static_cast<std::size_t>(twice_) + 1; }

  bool operator==(const Spin&) const = default;

 private:
  int twice_;
};

/// M single-particle Hermitian operators with Tr(a_k a_l) = C delta_kl and
/// sum_k <a_k>^2 <= K over single-particle states.
struct ObservableSet {
  std::string name;
  std::size_t local_dim = 0;
  std::vector<Operator> ops;
  double ortho_const = 0.0;
  double k_bound = 0.0;

  std::size_t size() const { return ops.size(); }
};

struct CollectiveSet {
  Layout layout;
  ObservableSet base;
  std::vector<Operator> collective;         ///< A_k = sum_n a_k^(n)
  std::vector<Operator> local_square_sums;  ///< sum_n (a_k^(n))^2
};

/// Largest |Tr(a_k a_l) - C delta_kl| and Hermiticity defect over the set.
inline double orthogonality_defect(const ObservableSet& set) {
  double worst = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    worst = std::max(worst, (set.ops[k] - set.ops[k].adjoint()).norm());
    for (std::size_t l = 0; l < set.size(); ++l) {
      const cplx g = (set.ops[k] * set.ops[l]).trace();
      const double target = (k == l) ? set.ortho_const : 0.0;
      worst = std::max(worst, std::abs(g - target));
    }
  }
  return worst;
}

/// Angular momentum components (j_x, j_y, j_z), Condon-Shortley phases,
/// basis ordered m = j, j-1, ..., -j. C = j(j+1)(2j+1)/3, K = j^2.
inline ObservableSet spin_matrices(Spin spin) {
  const double j = spin.value();
  const auto d = static_cast<Eigen::Index>(spin.dim());
  Operator jp = Operator::Zero(d, d);
  Operator jz = Operator::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double m = j - static_cast<double>(i);
    jz(i, i) = m;
    // j_+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits at index i-1.
    if (i > 0) jp(i - 1, i) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const Operator jm = jp.adjoint();
  const Operator jx = 0.5 * (jp + jm);
  const Operator jy = cplx(0.0, -0.5) * (jp - jm);

  ObservableSet set;
  set.name = (spin.twice() % 2 == 0) ? "spin:" + std::to_string(spin.twice() / 2)
                                     : "spin:" + std::to_string(spin.twice()) + "/2";
  set.local_dim = spin.dim();
  set.ops = {jx, jy, jz};
  set.ortho_const = j * (j + 1.0) * (2.0 * j + 1.0) / 3.0;
  set.k_bound = j * j;
  return set;
}

namespace detail {

inline Operator basis_op(Eigen::Index d, Eigen::Index r, Eigen::Index c, cplx v) {
  Operator m = Operator::Zero(d, d);
  m(r, c) = v;
  return m;
}

}  // namespace detail

/// Generalized Gell-Mann matrices: symmetric pairs (k<l lexicographic),
/// antisymmetric pairs, then diagonal. Tr(g_k g_l) = 2 delta_kl, K = 2(1 - 1/d).
inline ObservableSet gellmann_set(std::size_t d) {
  if (d < 2) throw InputError("Gell-Mann set needs d >= 2");
  const auto n = static_cast<Eigen::Index>(d);
  ObservableSet set;
  set.name = "gellmann:" + std::to_string(d);
  set.local_dim = d;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      set.ops.push_back(detail::basis_op(n, k, l, 1.0) + detail::basis_op(n, l, k, 1.0));
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      set.ops.push_back(detail::basis_op(n, k, l, cplx(0, -1)) + detail::basis_op(n, l, k, cplx(0, 1)));
    }
  }
  for (Eigen::Index l = 1; l < n; ++l) {
    Operator g = Operator::Zero(n, n);
    const double norm = std::sqrt(2.0 / static_cast<double>(l * (l + 1)));
    for (Eigen::Index m = 0; m < l; ++m) g(m, m) = norm;
    g(l, l) = -norm * static_cast<double>(l);
    set.ops.push_back(g);
  }
  set.ortho_const = 2.0;
  set.k_bound = 2.0 * (1.0 - 1.0 / static_cast<double>(d));
  return set;
}

/// Local orthogonal observables built from pairs of levels:
/// (|k><l| + |l><k|)/sqrt2, i(|k><l| - |l><k|)/sqrt2, |k><k|. C = 1, K = 1.
inline ObservableSet pairwise_loo_set(std::size_t d) {
  if (d < 2) throw InputError("LOO set needs d >= 2");
  const auto n = static_cast<Eigen::Index>(d);
  const double s = 1.0 / std::numbers::sqrt2;
  ObservableSet set;
  set.name = "loo:" + std::to_string(d);
  set.local_dim = d;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      set.ops.push_back(s * (detail::basis_op(n, k, l, 1.0) + detail::basis_op(n, l, k, 1.0)));
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k + 1; l < n; ++l) {
      set.ops.push_back(s * (detail::basis_op(n, k, l, cplx(0, 1)) - detail::basis_op(n, l, k, cplx(0, 1))));
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) set.ops.push_back(detail::basis_op(n, k, k, 1.0));
  set.ortho_const = 1.0;
  set.k_bound = 1.0;
  return set;
}

/// Multiplies every operator by `factor`; C and K scale by factor^2.
inline ObservableSet scaled_set(const ObservableSet& set, double factor, std::string name) {
  ObservableSet out = set;
  out.name = std::move(name);
  for (auto& op : out.ops) op *= factor;
  out.ortho_const *= factor * factor;
  out.k_bound *= factor * factor;
  return out;
}

/// g'_k = sum_l O_kl U g_l U^dagger. An orthogonal O and unitary U keep C and K.
inline ObservableSet remixed_set(const ObservableSet& set, const RealMatrix& mixing,
                                 const Matrix& unitary) {
  const auto m = static_cast<Eigen::Index>(set.size());
  if (mixing.rows() != m || mixing.cols() != m) throw InputError("mixing matrix must be M x M");
  if (static_cast<std::size_t>(unitary.rows()) != set.local_dim) {
    throw InputError("unitary must act on one particle");
  }
  ObservableSet out = set;
  out.name = set.name + "+remixed";
  const auto d = static_cast<Eigen::Index>(set.local_dim);
  for (Eigen::Index k = 0; k < m; ++k) {
    Operator g = Operator::Zero(d, d);
    for (Eigen::Index l = 0; l < m; ++l) g += mixing(k, l) * set.ops[static_cast<std::size_t>(l)];
    out.ops[static_cast<std::size_t>(k)] = unitary * g * unitary.adjoint();
  }
  return out;
}

/// Maximizes sum_k <a_k>^2 over pure single-particle states. The objective
/// is convex in the state, so stepping to the top eigenvector of
/// sum_k <a_k> a_k never decreases it.
inline double estimate_k(const ObservableSet& set, std::uint64_t seed = 1, int restarts = 16,
                         Vector* argmax = nullptr) {
  const auto d = static_cast<Eigen::Index>(set.local_dim);
  double best = -1.0;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(seed + static_cast<std::uint64_t>(r));
    Vector psi(d);
    for (Eigen::Index i = 0; i < d; ++i) psi(i) = rng.complex_normal();
    psi.normalize();
    double value = -1.0;
    for (int it = 0; it < 2000; ++it) {
      Operator h = Operator::Zero(d, d);
      double v = 0.0;
      for (const auto& a : set.ops) {
        const double x = psi.dot(a * psi).real();
        v += x * x;
        h += x * a;
      }
      if (v - value < 1e-15 && it > 0) {
        value = std::max(value, v);
        break;
      }
      value = v;
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
      psi = es.eigenvectors().col(d - 1);
    }
    if (value > best) {
      best = value;
      if (argmax) *argmax = psi;
    }
  }
  return best;
}

inline CollectiveSet collectivize(const ObservableSet& set, const Layout& layout) {
  if (set.local_dim != layout.local_dim()) {
    throw InputError("observable set dimension differs from layout local dimension");
  }
  CollectiveSet out{layout, set, {}, {}};
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  for (const auto& a : set.ops) {
    Operator total = Operator::Zero(dim, dim);
    Operator squares = Operator::Zero(dim, dim);
    const Operator a2 = a * a;
    for (std::size_t n = 0; n < layout.n_particles(); ++n) {
      total += embed(a, n, layout);
      squares += embed(a2, n, layout);
    }
    out.collective.push_back(std::move(total));
    out.local_square_sums.push_back(std::move(squares));
  }
  return out;
}

/// F|ab> = |ba> on two d-level particles.
inline Operator flip_operator(std::size_t d) {
  if (d < 2) throw InputError("flip operator needs d >= 2");
  const auto n = static_cast<Eigen::Index>(d);
  Operator f = Operator::Zero(n * n, n * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) f(b * n + a, a * n + b) = 1.0;
  }
  return f;
}

struct SymmetryProjectors {
  Operator symmetric;
  Operator antisymmetric;
};

inline SymmetryProjectors sym_antisym_projectors(const Layout& layout) {
  if (layout.n_particles() != 2) {
    throw InputError("two-particle projectors need N = 2; use symmetrizer for general N");
  }
  const Operator f = flip_operator(layout.local_dim());
  const Operator id = Operator::Identity(f.rows(), f.cols());
  return {0.5 * (id + f), 0.5 * (id - f)};
}

/// Projector onto the permutation-symmetric subspace, as the average over all
/// N! permutation operators (N <= 8).
inline Operator symmetrizer(const Layout& layout) {
  const std::size_t n = layout.n_particles();
  if (n > 8) throw InputError("symmetrizer limited to N <= 8");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  Operator out = Operator::Zero(dim, dim);
  double count = 0.0;
  do {
    for (std::size_t i = 0; i < layout.dim(); ++i) {
      std::size_t j = 0;
      for (std::size_t s = 0; s < n; ++s) j += layout.digit(i, s) * layout.stride(perm[s]);
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) += 1.0;
    }
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out / count;
}

/// sum_k A_k^2 from the collective operators directly.
inline Operator sum_of_squares(const CollectiveSet& set) {
  const auto dim = static_cast<Eigen::Index>(set.layout.dim());
  Operator out = Operator::Zero(dim, dim);
  for (const auto& a : set.collective) out.noalias() += a * a;
  return out;
}

/// sum_k G_k^2 for SU(d) generators assembled from pair flips:
/// 2N(d^2-1)/d I + 2 sum_{m != n} (F_mn - I/d). Needs only O(N^2 D d^2) work.
inline Operator sud_sum_of_squares_from_flips(const Layout& layout) {
  const double n = static_cast<double>(layout.n_particles());
  const double d = static_cast<double>(layout.local_dim());
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  Operator out = Operator::Identity(dim, dim) * (2.0 * n * (d * d - 1.0) / d - 2.0 * n * (n - 1.0) / d);
  const Operator f = flip_operator(layout.local_dim());
  for (std::size_t a = 0; a < layout.n_particles(); ++a) {
    for (std::size_t b = a + 1; b < layout.n_particles(); ++b) {
      const std::size_t sites[] = {a, b};
      out += 4.0 * embed_sites(f, sites, layout);
    }
  }
  return out;
}

/// Parses `spin:<j>` (j as 0.5, 1, 3/2, ...), `gellmann:<d>`, `loo:<d>`, and
/// `loo2:<d>` (the LOO set rescaled by sqrt2 so that C = 2).
inline ObservableSet parse_observable_set(std::string_view name) {
  const auto colon = name.find(':');
  if (colon == std::string_view::npos) throw InputError("operator set must look like kind:<param>");
  const std::string kind(name.substr(0, colon));
  const std::string arg(name.substr(colon + 1));
  try {
    if (kind == "spin") {
      const auto slash = arg.find('/');
      if (slash != std::string::npos) {
        const int num = std::stoi(arg.substr(0, slash));
        if (arg.substr(slash + 1) != "2") throw InputError("spin fraction must be over 2");
        return spin_matrices(Spin(num));
      }
      return spin_matrices(Spin::from_value(std::stod(arg)));
    }
    const auto d = static_cast<std::size_t>(std::stoul(arg));
    if (kind == "gellmann") return gellmann_set(d);
    if (kind == "loo") return pairwise_loo_set(d);
    if (kind == "loo2") return scaled_set(pairwise_loo_set(d), std::numbers::sqrt2, "loo2:" + arg);
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InputError*>(&e)) throw;
    throw InputError("bad operator set parameter in '" + std::string(name) + "'");
  }
  throw InputError("unknown operator set kind '" + kind + "'");
}

}  // namespace ssikit
