#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ssikit {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// A dense complex square matrix acting on some Hilbert space.
using Operator = Matrix;

inline constexpr std::size_t kDefaultDimCap = 4096;

/// Numerical tolerances shared by every module. Defaults are tuned for
/// double precision at total dimensions up to a few thousand.
struct Tolerances {
  double herm = 1e-9;         ///< relative Frobenius deviation from A = A^dagger
  double psd = 1e-9;          ///< absolute floor for eigenvalues of a state
  double trace = 1e-10;       ///< |Tr rho - 1|
  double eig = 1e-9;          ///< relative reconstruction error of eigensolves
  double violate = 1e-7;      ///< a margin below -violate counts as a violation
  double denominator = 1e-12; ///< polarization below this makes ratio criteria inapplicable
  double singlet = 1e-8;      ///< zero-eigenvalue threshold for singlet ground spaces
};

// Exceptions map one-to-one onto the CLI exit codes.

/// Malformed input, out-of-range parameters, dimension cap exceeded (exit 2).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix claimed to be a state breaks Hermiticity, positivity or trace (exit 3).
class StateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A separable bound was beaten numerically: the library itself is wrong (exit 4).
class CorrectnessAlarm : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// std::mt19937_64, whose output sequence the standard fixes. Distributions
/// are done by hand because the std ones differ between implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1].
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; no cached second variate so the
  /// stream position is a pure function of the number of calls.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Circularly symmetric complex Gaussian with E|z|^2 = 1.
  cplx complex_normal() {
    return cplx(normal(), normal()) / std::numbers::sqrt2;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

inline double frobenius(const Matrix& a) { return a.norm(); }

/// ||a - b||_F / max(1, ||b||_F)
inline double relative_deviation(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline bool is_hermitian(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

}  // namespace ssikit
