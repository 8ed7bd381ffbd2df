#pragma once

// Test-side oracles. Nothing here calls into the library's tensor or
// operator code, so agreement with the library is an independent check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// xorshift64* generator, deliberately different from the library's RNG.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : s_(seed * 2685821657736338717ULL + 0x2545F4914F6CDD1DULL) {
    if (s_ == 0) s_ = 1;
  }
  std::uint64_t next() {
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    return s_ * 2685821657736338717ULL;
  }
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() {
    const double u = uniform(), v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
  }
  cplx cnormal() { return {normal(), normal()}; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::uint64_t s_;
};

inline Vec random_vector(Eigen::Index dim, Gen& g) {
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = g.cnormal();
  return v.normalized();
}

inline Mat random_density(Eigen::Index dim, Gen& g, Eigen::Index rank = -1) {
  if (rank < 0) rank = dim;
  Mat a(dim, rank);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < rank; ++j) a(i, j) = g.cnormal();
  }
  Mat r = a * a.adjoint();
  r /= r.trace().real();
  return 0.5 * (r + r.adjoint());
}

inline Mat random_unitary(Eigen::Index dim, Gen& g) {
  Mat z(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) z(i, j) = g.cnormal();
  }
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  // Fix the phases so the distribution is Haar.
  for (Eigen::Index j = 0; j < dim; ++j) {
    const cplx r = qr.matrixQR()(j, j);
    q.col(j) *= r / std::abs(r);
  }
  return q;
}

/// Kronecker product by explicit index arithmetic.
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline Vec kron(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index k = 0; k < b.size(); ++k) out(i * b.size() + k) = a(i) * b(k);
  return out;
}

inline Mat eye(Eigen::Index d) { return Mat::Identity(d, d); }

/// op at `site` of n sites, identity elsewhere, via repeated Kronecker products.
inline Mat embed(const Mat& op, std::size_t site, std::size_t n) {
  const Eigen::Index d = op.rows();
  Mat out = Mat::Ones(1, 1);
  for (std::size_t s = 0; s < n; ++s) out = kron(out, s == site ? op : eye(d));
  return out;
}

inline Mat collective(const Mat& op, std::size_t n) {
  Mat sum = Mat::Zero(static_cast<Eigen::Index>(std::pow(op.rows(), n)), static_cast<Eigen::Index>(std::pow(op.rows(), n)));
  for (std::size_t s = 0; s < n; ++s) sum += embed(op, s, n);
  return sum;
}

inline double ev(const Mat& rho, const Mat& a) { return (rho * a).trace().real(); }

inline const cplx I{0.0, 1.0};

/// Row-major literal.
inline Mat literal(Eigen::Index d, std::initializer_list<cplx> entries) {
  Mat m(d, d);
  Eigen::Index k = 0;
  for (const cplx v : entries) {
    m(k / d, k % d) = v;
    ++k;
  }
  return m;
}

inline std::vector<Mat> pauli() {
  return {literal(2, {0, 1, 1, 0}), literal(2, {0, -I, I, 0}), literal(2, {1, 0, 0, -1})};
}

/// Spin-1 matrices in the basis |+1>, |0>, |-1>.
inline std::vector<Mat> spin1() {
  const double r = 1.0 / std::sqrt(2.0);
  return {literal(3, {0, r, 0, r, 0, r, 0, r, 0}), literal(3, {0, -I * r, 0, I * r, 0, -I * r, 0, I * r, 0}),
          literal(3, {1, 0, 0, 0, 0, 0, 0, 0, -1})};
}

/// The eight Gell-Mann matrices in their textbook order.
inline std::vector<Mat> gellmann3() {
  const double s = 1.0 / std::sqrt(3.0);
  return {literal(3, {0, 1, 0, 1, 0, 0, 0, 0, 0}),  literal(3, {0, -I, 0, I, 0, 0, 0, 0, 0}),
          literal(3, {1, 0, 0, 0, -1, 0, 0, 0, 0}), literal(3, {0, 0, 1, 0, 0, 0, 1, 0, 0}),
          literal(3, {0, 0, -I, 0, 0, 0, I, 0, 0}), literal(3, {0, 0, 0, 0, 0, 1, 0, 1, 0}),
          literal(3, {0, 0, 0, 0, 0, -I, 0, I, 0}), literal(3, {s, 0, 0, 0, s, 0, 0, 0, -2 * s})};
}

/// Flip (swap) operator on two d-level systems.
inline Mat flip(Eigen::Index d) {
  Mat f = Mat::Zero(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) f(b * d + a, a * d + b) = 1.0;
  return f;
}

/// Transpose of the first factor of a (dA x dB) bipartite matrix.
inline Mat transpose_first(const Mat& m, Eigen::Index da, Eigen::Index db) {
  Mat out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      for (Eigen::Index k = 0; k < db; ++k)
        for (Eigen::Index l = 0; l < db; ++l) out(j * db + k, i * db + l) = m(i * db + k, j * db + l);
  return out;
}

inline double min_eig(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Sum over k of Var(A_k) computed directly from the density matrix.
inline double variance_sum(const Mat& rho, const std::vector<Mat>& ops) {
  double s = 0.0;
  for (const auto& a : ops) {
    const double m = ev(rho, a);
    s += ev(rho, a * a) - m * m;
  }
  return s;
}

}  // namespace oracle
