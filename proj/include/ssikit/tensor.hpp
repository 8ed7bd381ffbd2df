#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ssikit/core.hpp"

namespace ssikit {

/// N particles with d levels each. Site 0 is the leftmost (most significant)
/// tensor factor, so basis index i has digit (i / d^(N-1-s)) % d at site s.
class Layout {
 public:
  Layout(std::size_t n_particles, std::size_t local_dim, std::size_t cap = kDefaultDimCap)
      : n_(n_particles), d_(local_dim), cap_(cap) {
    if (n_ < 1) throw InputError("layout needs at least one particle");
    if (d_ < 2) throw InputError("local dimension must be at least 2");
    std::size_t dim = 1;
    strides_.assign(n_, 1);
    for (std::size_t i = 0; i < n_; ++i) {
      if (dim > cap_ / d_) {
        throw InputError("dimension cap exceeded: " + std::to_string(d_) + "^" +
                         std::to_string(n_) + " > " + std::to_string(cap_));
      }
      dim *= d_;
    }
    dim_ = dim;
    for (std::size_t s = n_; s-- > 0;) {
      strides_[s] = (s + 1 == n_) ? 1 : strides_[s + 1] * d_;
    }
  }

  std::size_t n_particles() const { return n_; }
  std::size_t local_dim() const { return d_; }
  std::size_t dim() const { return dim_; }
  std::size_t cap() const { return cap_; }
  std::size_t stride(std::size_t site) const { return strides_.at(site); }
  std::size_t digit(std::size_t index, std::size_t site) const {
    return (index / strides_[site]) % d_;
  }

  bool operator==(const Layout& o) const { return n_ == o.n_ && d_ == o.d_; }

 private:
  std::size_t n_;
  std::size_t d_;
  std::size_t cap_;
  std::size_t dim_ = 1;
  std::vector<std::size_t> strides_;
};

class PureState {
 public:
  PureState(Layout layout, Vector amplitudes, const Tolerances& tol = {})
      : layout_(std::move(layout)), amp_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amp_.size()) != layout_.dim()) {
      throw InputError("pure state length does not match layout dimension");
    }
    if (!amp_.allFinite()) throw StateError("pure state has non-finite amplitudes");
    if (std::abs(amp_.squaredNorm() - 1.0) > tol.trace) {
      throw StateError("pure state is not normalized (norm^2 = " +
                       std::to_string(amp_.squaredNorm()) + ")");
    }
  }

  const Layout& layout() const { return layout_; }
  const Vector& amplitudes() const { return amp_; }
  std::size_t dim() const { return layout_.dim(); }

 private:
  Layout layout_;
  Vector amp_;
};

/// Hermitian, positive semidefinite, unit-trace matrix on a Layout.
/// Every constructor validates; there is no unchecked path.
class DensityMatrix {
 public:
  DensityMatrix(Layout layout, Matrix entries, const Tolerances& tol = {})
      : layout_(std::move(layout)), rho_(std::move(entries)) {
    const auto dim = static_cast<Eigen::Index>(layout_.dim());
    if (rho_.rows() != dim || rho_.cols() != dim) {
      throw InputError("density matrix shape does not match layout dimension");
    }
    if (!rho_.allFinite()) throw StateError("density matrix has non-finite entries");
    if (!is_hermitian(rho_, tol.herm)) throw StateError("density matrix is not Hermitian");
    const double tr = rho_.trace().real();
    if (std::abs(tr - 1.0) > tol.trace) {
      throw StateError("density matrix trace is " + std::to_string(tr));
    }
    // rho + tau*I is positive definite iff min eig(rho) > -tau (up to rounding).
    Matrix shifted = 0.5 * (rho_ + rho_.adjoint());
    shifted.diagonal().array() += tol.psd;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) {
      throw StateError("density matrix has an eigenvalue below -" + std::to_string(tol.psd));
    }
  }

  explicit DensityMatrix(const PureState& psi, const Tolerances& tol = {})
      : DensityMatrix(psi.layout(), psi.amplitudes() * psi.amplitudes().adjoint(), tol) {}

  const Layout& layout() const { return layout_; }
  const Matrix& matrix() const { return rho_; }
  std::size_t dim() const { return layout_.dim(); }

 private:
  Layout layout_;
  Matrix rho_;
};

inline DensityMatrix maximally_mixed(const Layout& layout) {
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  return DensityMatrix(layout, Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

inline Operator kron(const Operator& a, const Operator& b, std::size_t cap = kDefaultDimCap) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) throw InputError("kron needs square operators");
  const Eigen::Index na = a.rows();
  const Eigen::Index nb = b.rows();
  if (na != 0 && static_cast<std::size_t>(nb) > cap / static_cast<std::size_t>(na)) {
    throw InputError("kron result exceeds dimension cap");
  }
  Operator out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
    }
  }
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

namespace detail {

inline void check_sites(std::span<const std::size_t> sites, const Layout& layout) {
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] >= layout.n_particles()) {
      throw InputError("site " + std::to_string(sites[i]) + " out of range");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (sites[i] == sites[j]) throw InputError("repeated site in site list");
    }
  }
}

// offsets[c] = sum_t digit_t(c) * stride(sites[t]), where c enumerates d^k
// configurations of the listed sites with sites[0] most significant.
inline std::vector<std::size_t> site_offsets(std::span<const std::size_t> sites,
                                             const Layout& layout) {
  const std::size_t d = layout.local_dim();
  std::vector<std::size_t> offsets{0};
  for (const std::size_t s : sites) {
    std::vector<std::size_t> next;
    next.reserve(offsets.size() * d);
    for (const std::size_t o : offsets) {
      for (std::size_t v = 0; v < d; ++v) next.push_back(o + v * layout.stride(s));
    }
    offsets = std::move(next);
  }
  return offsets;
}

inline std::vector<std::size_t> complement(std::span<const std::size_t> sites, std::size_t n) {
  std::vector<std::size_t> rest;
  for (std::size_t s = 0; s < n; ++s) {
    if (std::find(sites.begin(), sites.end(), s) == sites.end()) rest.push_back(s);
  }
  return rest;
}

}  // namespace detail

/// Places `op` (acting on d^k levels, factors ordered as `sites`) on the
/// listed sites and the identity elsewhere.
inline Operator embed_sites(const Operator& op, std::span<const std::size_t> sites,
                            const Layout& layout) {
  detail::check_sites(sites, layout);
  const auto on = detail::site_offsets(sites, layout);
  if (static_cast<std::size_t>(op.rows()) != on.size() || op.rows() != op.cols()) {
    throw InputError("operator dimension does not match the number of embedded sites");
  }
  const auto rest = detail::complement(sites, layout.n_particles());
  const auto off = detail::site_offsets(rest, layout);
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  Operator out = Operator::Zero(dim, dim);
  for (const std::size_t base : off) {
    for (std::size_t r = 0; r < on.size(); ++r) {
      for (std::size_t c = 0; c < on.size(); ++c) {
        const cplx v = op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        if (v != cplx(0.0)) {
          out(static_cast<Eigen::Index>(base + on[r]), static_cast<Eigen::Index>(base + on[c])) = v;
        }
      }
    }
  }
  return out;
}

inline Operator embed(const Operator& op, std::size_t site, const Layout& layout) {
  if (static_cast<std::size_t>(op.rows()) != layout.local_dim()) {
    throw InputError("single-site operator dimension differs from local dimension");
  }
  const std::size_t sites[] = {site};
  return embed_sites(op, sites, layout);
}

/// Transposes the tensor factors on `sites`. Works on any operator, not only states.
inline Operator partial_transpose(const Operator& rho, std::span<const std::size_t> sites,
                                  const Layout& layout) {
  detail::check_sites(sites, layout);
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  if (rho.rows() != dim || rho.cols() != dim) throw InputError("operator/layout mismatch");
  const auto on = detail::site_offsets(sites, layout);
  const auto rest = detail::complement(sites, layout.n_particles());
  const auto off = detail::site_offsets(rest, layout);
  Operator out(dim, dim);
  for (const std::size_t bi : off) {
    for (const std::size_t bj : off) {
      for (std::size_t r = 0; r < on.size(); ++r) {
        for (std::size_t c = 0; c < on.size(); ++c) {
          out(static_cast<Eigen::Index>(bi + on[r]), static_cast<Eigen::Index>(bj + on[c])) =
              rho(static_cast<Eigen::Index>(bi + on[c]), static_cast<Eigen::Index>(bj + on[r]));
        }
      }
    }
  }
  return out;
}

inline Operator partial_transpose(const DensityMatrix& rho, std::span<const std::size_t> sites) {
  return partial_transpose(rho.matrix(), sites, rho.layout());
}

/// Traces out every site not in `keep`; kept factors appear in the order given.
inline Operator partial_trace(const Operator& rho, std::span<const std::size_t> keep,
                              const Layout& layout) {
  if (keep.empty()) throw InputError("partial trace needs a nonempty keep set");
  detail::check_sites(keep, layout);
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  if (rho.rows() != dim || rho.cols() != dim) throw InputError("operator/layout mismatch");
  const auto on = detail::site_offsets(keep, layout);
  const auto rest = detail::complement(keep, layout.n_particles());
  const auto off = detail::site_offsets(rest, layout);
  const auto k = static_cast<Eigen::Index>(on.size());
  Operator out = Operator::Zero(k, k);
  for (const std::size_t e : off) {
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) {
        out(r, c) += rho(static_cast<Eigen::Index>(e + on[r]), static_cast<Eigen::Index>(e + on[c]));
      }
    }
  }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  Layout reduced(keep.size(), rho.layout().local_dim(), rho.layout().cap());
  return DensityMatrix(reduced, partial_trace(rho.matrix(), keep, rho.layout()));
}

struct EigenDecomposition {
  RealVector values;  ///< ascending
  Matrix vectors;     ///< orthonormal columns
};

inline EigenDecomposition herm_eig(const Operator& a, const Tolerances& tol = {}) {
  if (!is_hermitian(a, tol.herm)) throw InputError("herm_eig: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.adjoint()));
  if (solver.info() != Eigen::Success) throw InputError("herm_eig: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const Operator& a, const Tolerances& tol = {}) {
  if (!is_hermitian(a, tol.herm)) throw InputError("min_eigenvalue: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

inline double max_eigenvalue(const Operator& a, const Tolerances& tol = {}) {
  if (!is_hermitian(a, tol.herm)) throw InputError("max_eigenvalue: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

/// V exp(scale * Lambda) V^dagger for Hermitian a.
inline Operator matrix_exp_herm(const Operator& a, double scale, const Tolerances& tol = {}) {
  const auto eig = herm_eig(a, tol);
  const RealVector w = (scale * eig.values).array().exp();
  return eig.vectors * w.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

/// Tr(rho a) for Hermitian a; throws when the imaginary part betrays a
/// non-Hermitian observable.
inline double expectation(const Matrix& rho, const Operator& a, const Tolerances& tol = {}) {
  if (rho.rows() != a.rows() || rho.cols() != a.cols()) {
    throw InputError("expectation: dimension mismatch");
  }
  const cplx v = rho.cwiseProduct(a.transpose()).sum();
  if (std::abs(v.imag()) > tol.herm * std::max(1.0, a.norm())) {
    throw InputError("expectation: observable is not Hermitian");
  }
  return v.real();
}

inline double expectation(const DensityMatrix& rho, const Operator& a, const Tolerances& tol = {}) {
  return expectation(rho.matrix(), a, tol);
}

inline double expectation(const PureState& psi, const Operator& a, const Tolerances& tol = {}) {
  if (static_cast<std::size_t>(a.rows()) != psi.dim()) {
    throw InputError("expectation: dimension mismatch");
  }
  const cplx v = psi.amplitudes().dot(a * psi.amplitudes());
  if (std::abs(v.imag()) > tol.herm * std::max(1.0, a.norm())) {
    throw InputError("expectation: observable is not Hermitian");
  }
  return v.real();
}

/// Permutation operator P|i_0 ... i_{N-1}> = |i'> with factor at site s moved to perm[s].
inline Operator permutation_operator(std::span<const std::size_t> perm, const Layout& layout) {
  if (perm.size() != layout.n_particles()) throw InputError("permutation length mismatch");
  detail::check_sites(perm, layout);
  const auto dim = static_cast<Eigen::Index>(layout.dim());
  Operator out = Operator::Zero(dim, dim);
  for (std::size_t i = 0; i < layout.dim(); ++i) {
    std::size_t j = 0;
    for (std::size_t s = 0; s < perm.size(); ++s) j += layout.digit(i, s) * layout.stride(perm[s]);
    out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return out;
}

/// Swap of two sites as a full-space permutation.
inline Operator swap_operator(std::size_t a, std::size_t b, const Layout& layout) {
  std::vector<std::size_t> perm(layout.n_particles());
  for (std::size_t s = 0; s < perm.size(); ++s) perm[s] = s;
  std::swap(perm.at(a), perm.at(b));
  return permutation_operator(perm, layout);
}

}  // namespace ssikit
