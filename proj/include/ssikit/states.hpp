#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "ssikit/observables.hpp"

namespace ssikit {

namespace detail {

/// Fixes the global phase so the first non-negligible amplitude is real positive.
inline Vector canonical_phase(Vector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      v *= std::conj(v(i)) / std::abs(v(i));
      break;
    }
  }
  return v;
}

inline Vector random_unit_vector(Eigen::Index dim, Rng& rng) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  return v.normalized();
}

}  // namespace detail

/// Tensor product of single-particle pure states (all of equal dimension d).
inline PureState product_state(const std::vector<Vector>& locals, std::size_t cap = kDefaultDimCap) {
  if (locals.empty()) throw InputError("product state needs at least one factor");
  const auto d = static_cast<std::size_t>(locals.front().size());
  Layout layout(locals.size(), d, cap);
  Vector psi = Vector::Ones(1);
  for (const auto& v : locals) {
    if (static_cast<std::size_t>(v.size()) != d) throw InputError("product factors differ in dimension");
    if (std::abs(v.squaredNorm() - 1.0) > 1e-10) throw InputError("product factor is not normalized");
    psi = kron(psi, v);
  }
  return PureState(layout, psi);
}

/// psi^(x N).
inline PureState identical_product(const Vector& local, std::size_t n_particles,
                                   std::size_t cap = kDefaultDimCap) {
  return product_state(std::vector<Vector>(n_particles, local), cap);
}

/// Highest-weight eigenvector of n . (j_x, j_y, j_z).
inline Vector spin_coherent_local(Spin spin, const std::array<double, 3>& direction) {
  const double len = std::sqrt(direction[0] * direction[0] + direction[1] * direction[1] +
                               direction[2] * direction[2]);
  if (!(len > 1e-12)) throw InputError("coherent state direction must be nonzero");
  const auto set = spin_matrices(spin);
  const Operator h = (direction[0] * set.ops[0] + direction[1] * set.ops[1] + direction[2] * set.ops[2]) / len;
  const auto eig = herm_eig(h);
  return detail::canonical_phase(eig.vectors.col(eig.vectors.cols() - 1));
}

inline PureState coherent_spin_state(Spin spin, const std::array<double, 3>& direction,
                                     std::size_t n_particles, std::size_t cap = kDefaultDimCap) {
  const Vector local = spin_coherent_local(spin, direction);
  return product_state(std::vector<Vector>(n_particles, local), cap);
}

/// Equal superposition of all distinct orderings of N/2 particles in |+j>
/// and N/2 in |-j>.
inline PureState dicke_state(std::size_t n_particles, Spin spin, std::size_t cap = kDefaultDimCap) {
  if (n_particles == 0 || n_particles % 2 != 0) throw InputError("Dicke state needs even N");
  const std::size_t limit = spin.twice() == 1 ? 12 : 8;
  if (n_particles > limit) throw InputError("Dicke enumeration limited to N <= " + std::to_string(limit));
  Layout layout(n_particles, spin.dim(), cap);
  std::vector<std::size_t> pattern(n_particles, 0);
  std::fill(pattern.begin() + static_cast<std::ptrdiff_t>(n_particles / 2), pattern.end(), spin.dim() - 1);
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(layout.dim()));
  do {
    std::size_t index = 0;
    for (std::size_t s = 0; s < n_particles; ++s) index += pattern[s] * layout.stride(s);
    psi(static_cast<Eigen::Index>(index)) += 1.0;
  } while (std::next_permutation(pattern.begin(), pattern.end()));
  psi.normalize();
  return PureState(layout, psi);
}

/// Uniform mixture over the (near-)zero eigenspace of a PSD Hamiltonian.
/// Throws InputError carrying the smallest eigenvalue when none exists.
inline DensityMatrix ground_space_mixture(const Operator& h, const Layout& layout, double zero_tol,
                                          const char* what) {
  const auto eig = herm_eig(h);
  const double lowest = eig.values(0);
  if (lowest > zero_tol) {
    throw InputError(std::string("no ") + what + " exists for N = " +
                     std::to_string(layout.n_particles()) + ", d = " +
                     std::to_string(layout.local_dim()) + "; smallest eigenvalue " + std::to_string(lowest));
  }
  Eigen::Index rank = 0;
  while (rank < eig.values.size() && eig.values(rank) <= zero_tol) ++rank;
  const Matrix basis = eig.vectors.leftCols(rank);
  return DensityMatrix(layout, basis * basis.adjoint() / static_cast<double>(rank));
}

/// Many-body SU(d) singlet: uniform mixture over the zero eigenspace of
/// sum_k G_k^2. Exists when d divides N.
inline DensityMatrix sud_singlet(std::size_t n_particles, std::size_t d, const Tolerances& tol = {},
                                 std::size_t cap = kDefaultDimCap) {
  Layout layout(n_particles, d, cap);
  return ground_space_mixture(sud_sum_of_squares_from_flips(layout), layout, tol.singlet, "SU(d) singlet");
}

/// Total angular momentum zero: uniform mixture over the kernel of sum_l J_l^2.
inline DensityMatrix spin_singlet(std::size_t n_particles, Spin spin, const Tolerances& tol = {},
                                  std::size_t cap = kDefaultDimCap) {
  Layout layout(n_particles, spin.dim(), cap);
  const auto collective = collectivize(spin_matrices(spin), layout);
  return ground_space_mixture(sum_of_squares(collective), layout, tol.singlet, "angular momentum singlet");
}

inline DensityMatrix white_noise_mix(const DensityMatrix& rho, double p_noise) {
  if (!(p_noise >= 0.0 && p_noise <= 1.0)) throw InputError("noise fraction must lie in [0, 1]");
  const auto dim = static_cast<Eigen::Index>(rho.dim());
  return DensityMatrix(rho.layout(), (1.0 - p_noise) * rho.matrix() +
                                         p_noise * Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

/// exp(-H/T)/Z with the spectrum shifted to start at zero.
inline DensityMatrix thermal_state(const Operator& h, const Layout& layout, double temperature) {
  if (!(temperature > 0.0)) throw InputError("temperature must be positive");
  if (static_cast<std::size_t>(h.rows()) != layout.dim()) throw InputError("Hamiltonian/layout mismatch");
  const auto eig = herm_eig(h);
  const RealVector w = (-(eig.values.array() - eig.values(0)) / temperature).exp();
  const RealVector p = w / w.sum();
  Matrix rho = eig.vectors * p.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix(layout, rho);
}

/// Maps each pure qubit to the spin-j coherent state along its Bloch vector,
/// so that Tr(rho sigma_l) j = Tr(omega j_l).
inline PureState lift_qubit_product(const std::vector<Vector>& qubits, Spin spin,
                                    std::size_t cap = kDefaultDimCap) {
  const auto pauli = gellmann_set(2);
  std::vector<Vector> lifted;
  for (const auto& q : qubits) {
    if (q.size() != 2) throw InputError("lift expects qubit factors");
    if (std::abs(q.squaredNorm() - 1.0) > 1e-10) throw InputError("lift expects normalized qubits");
    std::array<double, 3> bloch{};
    for (std::size_t l = 0; l < 3; ++l) bloch[l] = q.dot(pauli.ops[l] * q).real();
    const double len = std::sqrt(bloch[0] * bloch[0] + bloch[1] * bloch[1] + bloch[2] * bloch[2]);
    if (std::abs(len - 1.0) > 1e-9) throw InputError("lift expects pure qubit factors");
    lifted.push_back(spin_coherent_local(spin, bloch));
  }
  return product_state(lifted, cap);
}

/// (1/N(N-1)) sum over ordered pairs m != n of the two-site reduced state.
inline DensityMatrix average_two_particle_state(const DensityMatrix& rho) {
  const auto& layout = rho.layout();
  const std::size_t n = layout.n_particles();
  if (n < 2) throw InputError("two-particle average needs N >= 2");
  const std::size_t d = layout.local_dim();
  Layout pair(2, d, layout.cap());
  const Operator f = flip_operator(d);
  Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d * d));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const std::size_t keep[] = {a, b};
      const Matrix r = partial_trace(rho.matrix(), keep, layout);
      acc += r + f * r * f;
    }
  }
  acc /= static_cast<double>(n * (n - 1));
  return DensityMatrix(pair, 0.5 * (acc + acc.adjoint()));
}

/// Rotation-invariant (Haar) pure state.
inline PureState random_pure(const Layout& layout, Rng& rng) {
  return PureState(layout, detail::random_unit_vector(static_cast<Eigen::Index>(layout.dim()), rng));
}

/// G G^dagger / Tr with G a square complex Gaussian matrix.
inline DensityMatrix random_density(const Layout& layout, Rng& rng) {
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  Matrix g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = rng.complex_normal();
  }
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(layout, 0.5 * (rho + rho.adjoint()));
}

inline std::vector<Vector> random_locals(const Layout& layout, Rng& rng) {
  std::vector<Vector> locals;
  for (std::size_t n = 0; n < layout.n_particles(); ++n) {
    locals.push_back(detail::random_unit_vector(static_cast<Eigen::Index>(layout.local_dim()), rng));
  }
  return locals;
}

/// Independent Haar-random pure state on every site.
inline PureState random_product(const Layout& layout, Rng& rng) {
  return product_state(random_locals(layout, rng), layout.cap());
}

inline PureState random_pure(const Layout& layout, std::uint64_t seed) {
  Rng rng(seed);
  return random_pure(layout, rng);
}
inline DensityMatrix random_density(const Layout& layout, std::uint64_t seed) {
  Rng rng(seed);
  return random_density(layout, rng);
}
inline PureState random_product(const Layout& layout, std::uint64_t seed) {
  Rng rng(seed);
  return random_product(layout, rng);
}

/// P_sym G G^dagger P_sym / Tr: a random state supported on the symmetric subspace.
inline DensityMatrix random_symmetric_density(const Layout& layout, Rng& rng, const Operator& sym) {
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  Matrix g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = rng.complex_normal();
  }
  Matrix rho = sym * g * g.adjoint() * sym;
  rho /= rho.trace().real();
  return DensityMatrix(layout, 0.5 * (rho + rho.adjoint()));
}

inline PureState random_symmetric_pure(const Layout& layout, Rng& rng, const Operator& sym) {
  Vector v = sym * detail::random_unit_vector(static_cast<Eigen::Index>(layout.dim()), rng);
  return PureState(layout, v.normalized());
}

/// Invariance under every adjacent transposition (these generate S_N).
inline bool is_permutation_symmetric(const DensityMatrix& rho, double tol = 1e-8) {
  const auto& layout = rho.layout();
  for (std::size_t s = 0; s + 1 < layout.n_particles(); ++s) {
    const Operator p = swap_operator(s, s + 1, layout);
    if ((p * rho.matrix() * p.adjoint() - rho.matrix()).norm() > tol * std::max(1.0, rho.matrix().norm())) {
      return false;
    }
  }
  return true;
}

}  // namespace ssikit
