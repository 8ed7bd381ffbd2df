#pragma once

#include <array>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "ssikit/states.hpp"

namespace ssikit {

/// First and second collective moments for one operator set, plus the
/// modified moments that drop the single-particle square terms.
struct MomentTable {
  std::size_t n_particles = 0;
  std::vector<double> mean;              ///< <A_k>
  std::vector<double> raw_second;        ///< <A_k^2>
  std::vector<double> local_square_sum;  ///< <sum_n (a_k^(n))^2>
  std::vector<double> mod_second;        ///< <A_k^2> - <sum_n (a_k^(n))^2>
  std::vector<double> mod_variance;      ///< Var(A_k) - <sum_n (a_k^(n))^2>

  static MomentTable from_moments(std::size_t n, std::vector<double> mean, std::vector<double> raw,
                                  std::vector<double> local_sq) {
    MomentTable t;
    t.n_particles = n;
    t.mean = std::move(mean);
    t.raw_second = std::move(raw);
    t.local_square_sum = std::move(local_sq);
    const std::size_t m = t.mean.size();
    if (t.raw_second.size() != m || t.local_square_sum.size() != m) {
      throw InputError("moment vectors differ in length");
    }
    t.mod_second.resize(m);
    t.mod_variance.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      t.mod_second[k] = t.raw_second[k] - t.local_square_sum[k];
      t.mod_variance[k] = t.raw_second[k] - t.mean[k] * t.mean[k] - t.local_square_sum[k];
    }
    return t;
  }

  std::size_t size() const { return mean.size(); }
  double variance(std::size_t k) const { return raw_second[k] - mean[k] * mean[k]; }
  double variance_sum() const {
    double s = 0.0;
    for (std::size_t k = 0; k < size(); ++k) s += variance(k);
    return s;
  }
};

inline MomentTable moment_table(const DensityMatrix& rho, const CollectiveSet& set) {
  if (!(rho.layout() == set.layout)) throw InputError("state and operator set layouts differ");
  std::vector<double> mean, raw, loc;
  const Matrix& r = rho.matrix();
  for (std::size_t k = 0; k < set.collective.size(); ++k) {
    const Operator& a = set.collective[k];
    const Matrix ra = r * a;
    // Tr(rho A) and Tr(rho A A) using A_ji = conj(A_ij).
    mean.push_back(r.cwiseProduct(a.conjugate()).sum().real());
    raw.push_back(ra.cwiseProduct(a.conjugate()).sum().real());
    loc.push_back(r.cwiseProduct(set.local_square_sums[k].conjugate()).sum().real());
  }
  return MomentTable::from_moments(rho.layout().n_particles(), mean, raw, loc);
}

inline MomentTable moment_table(const PureState& psi, const CollectiveSet& set) {
  if (!(psi.layout() == set.layout)) throw InputError("state and operator set layouts differ");
  std::vector<double> mean, raw, loc;
  const Vector& v = psi.amplitudes();
  for (std::size_t k = 0; k < set.collective.size(); ++k) {
    const Vector av = set.collective[k] * v;
    mean.push_back(v.dot(av).real());
    raw.push_back(av.squaredNorm());
    loc.push_back(v.dot(set.local_square_sums[k] * v).real());
  }
  return MomentTable::from_moments(psi.layout().n_particles(), mean, raw, loc);
}

enum class ReportStatus { ok, inapplicable };

/// Oriented so that the inequality holds iff margin = lhs - rhs >= 0.
struct CriterionReport {
  std::string criterion;
  std::vector<std::size_t> index_set;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool violated = false;
  ReportStatus status = ReportStatus::ok;
};

inline CriterionReport make_report(std::string id, std::vector<std::size_t> index_set, double lhs,
                                   double rhs, double tau_violate) {
  CriterionReport r{std::move(id), std::move(index_set), lhs, rhs, lhs - rhs, false, ReportStatus::ok};
  r.violated = r.margin < -tau_violate;
  return r;
}

/// A separability inequality expressed through the moment table of `set`.
struct Criterion {
  std::string id;
  ObservableSet set;
  std::vector<std::size_t> index_set;
  std::function<CriterionReport(const MomentTable&)> evaluate;

  double margin(const MomentTable& t) const { return evaluate(t).margin; }
};

enum class Axis : std::size_t { x = 0, y = 1, z = 2 };

inline const char* axis_name(Axis a) {
  static constexpr const char* names[] = {"x", "y", "z"};
  return names[static_cast<std::size_t>(a)];
}

inline Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  if (s == "z") return Axis::z;
  throw InputError("axis must be x, y or z");
}

/// Sorted, duplicate-free, every entry below m.
inline std::vector<std::size_t> normalize_index_set(std::vector<std::size_t> index_set, std::size_t m) {
  std::sort(index_set.begin(), index_set.end());
  if (std::adjacent_find(index_set.begin(), index_set.end()) != index_set.end()) {
    throw InputError("index set has duplicates");
  }
  if (!index_set.empty() && index_set.back() >= m) throw InputError("index set entry out of range");
  return index_set;
}

/// All 2^M subsets, M <= 10.
inline std::vector<std::vector<std::size_t>> all_index_sets(std::size_t m) {
  if (m > 10) throw InputError("full index-set enumeration limited to M <= 10");
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < m; ++k) {
      if (mask & (std::size_t{1} << k)) s.push_back(k);
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Empty set, full set, every singleton and every singleton complement.
inline std::vector<std::vector<std::size_t>> canonical_index_sets(std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  auto push = [&](std::vector<std::size_t> s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  };
  std::vector<std::size_t> full(m);
  std::iota(full.begin(), full.end(), 0);
  push({});
  push(full);
  for (std::size_t k = 0; k < m; ++k) push({k});
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<std::size_t> c;
    for (std::size_t l = 0; l < m; ++l) {
      if (l != k) c.push_back(l);
    }
    push(c);
  }
  return out;
}

inline bool contains(const std::vector<std::size_t>& s, std::size_t k) {
  return std::binary_search(s.begin(), s.end(), k);
}

// ---------------------------------------------------------------------------
// General family for an arbitrary orthogonal set with bound K:
//   (N-1) sum_{k in I} modvar_k - sum_{k not in I} modsecond_k >= -N(N-1)K
// ---------------------------------------------------------------------------

inline Criterion general_ssi_criterion(const ObservableSet& set, std::vector<std::size_t> index_set,
                                       const Tolerances& tol = {}) {
  index_set = normalize_index_set(std::move(index_set), set.size());
  const double k_bound = set.k_bound;
  auto eval = [index_set, k_bound, tau = tol.violate](const MomentTable& t) {
    const double n = static_cast<double>(t.n_particles);
    double lhs = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      lhs += contains(index_set, k) ? (n - 1.0) * t.mod_variance[k] : -t.mod_second[k];
    }
    return make_report("obs1", index_set, lhs, -n * (n - 1.0) * k_bound, tau);
  };
  return {"obs1", set, index_set, eval};
}

// ---------------------------------------------------------------------------
// Complete family for collective angular momenta of spin-j particles.
// ---------------------------------------------------------------------------

/// sum_l <J_l^2> <= Nj(Nj+1); holds for every state.
inline Criterion total_spin_criterion(Spin spin, const Tolerances& tol = {}) {
  const double j = spin.value();
  auto eval = [j, tau = tol.violate](const MomentTable& t) {
    const double n = static_cast<double>(t.n_particles);
    const double second = t.raw_second[0] + t.raw_second[1] + t.raw_second[2];
    return make_report("eq5a", {}, n * j * (n * j + 1.0), second, tau);
  };
  return {"eq5a", spin_matrices(spin), {}, eval};
}

/// sum_l Var(J_l) >= Nj; maximally violated by angular momentum singlets.
inline Criterion spin_variance_criterion(Spin spin, const Tolerances& tol = {}) {
  const double j = spin.value();
  auto eval = [j, tau = tol.violate](const MomentTable& t) {
    const double n = static_cast<double>(t.n_particles);
    return make_report("eq5b", {0, 1, 2}, t.variance_sum(), n * j, tau);
  };
  return {"eq5b", spin_matrices(spin), {0, 1, 2}, eval};
}

/// (N-1) modvar_m >= modsecond_k + modsecond_l - N(N-1)j^2 for {k,l,m} = {x,y,z}.
inline Criterion single_axis_squeezing_criterion(Spin spin, Axis m, const Tolerances& tol = {}) {
  const double j = spin.value();
  const auto mi = static_cast<std::size_t>(m);
  const std::string id = std::string("eq5c:") + axis_name(m);
  auto eval = [j, mi, id, tau = tol.violate](const MomentTable& t) {
    const double n = static_cast<double>(t.n_particles);
    double others = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      if (k != mi) others += t.mod_second[k];
    }
    return make_report(id, {mi}, (n - 1.0) * t.mod_variance[mi], others - n * (n - 1.0) * j * j, tau);
  };
  return {id, spin_matrices(spin), {mi}, eval};
}

/// (N-1)(modvar_k + modvar_l) >= modsecond_m - N(N-1)j^2.
inline Criterion two_axis_squeezing_criterion(Spin spin, Axis m, const Tolerances& tol = {}) {
  const double j = spin.value();
  const auto mi = static_cast<std::size_t>(m);
  std::vector<std::size_t> kl;
  for (std::size_t k = 0; k < 3; ++k) {
    if (k != mi) kl.push_back(k);
  }
  const std::string id = std::string("eq5d:") + axis_name(m);
  auto eval = [j, mi, kl, id, tau = tol.violate](const MomentTable& t) {
    const double n = static_cast<double>(t.n_particles);
    const double lhs = (n - 1.0) * (t.mod_variance[kl[0]] + t.mod_variance[kl[1]]);
    return make_report(id, kl, lhs, t.mod_second[mi] - n * (n - 1.0) * j * j, tau);
  };
  return {id, spin_matrices(spin), kl, eval};
}

/// All eight members of the optimal angular-momentum family.
inline std::vector<Criterion> optimal_ssi_criteria(Spin spin, const Tolerances& tol = {}) {
  std::vector<Criterion> out{total_spin_criterion(spin, tol), spin_variance_criterion(spin, tol)};
  for (Axis a : {Axis::x, Axis::y, Axis::z}) out.push_back(single_axis_squeezing_criterion(spin, a, tol));
  for (Axis a : {Axis::x, Axis::y, Axis::z}) out.push_back(two_axis_squeezing_criterion(spin, a, tol));
  return out;
}

/// Axis roles for the polarization-based inequalities: variance along
/// `squeezed`, polarization in the plane of the other two axes.
struct SsiAxes {
  Axis squeezed = Axis::x;

  std::array<std::size_t, 2> transverse() const {
    const auto s = static_cast<std::size_t>(squeezed);
    return {(s + 1) % 3, (s + 2) % 3};
  }
};

namespace detail {

inline CriterionReport polarization_report(std::string id, double lhs, double polarization,
                                           const Tolerances& tol) {
  auto r = make_report(std::move(id), {}, lhs, polarization, tol.violate);
  if (polarization <= tol.denominator) {
    r.status = ReportStatus::inapplicable;
    r.violated = false;
  }
  return r;
}

}  // namespace detail

/// N Var(J_s) >= <J_t1>^2 + <J_t2>^2, the qubit-era inequality. For j > 1/2
/// separable states can violate it.
inline Criterion standard_ssi_criterion(Spin spin, SsiAxes axes = {}, const Tolerances& tol = {}) {
  auto eval = [axes, tol](const MomentTable& t) {
    const double n = static_cast<double>(t.n_particles);
    const auto s = static_cast<std::size_t>(axes.squeezed);
    const auto [a, b] = axes.transverse();
    const double pol = t.mean[a] * t.mean[a] + t.mean[b] * t.mean[b];
    return detail::polarization_report("eq1", n * t.variance(s), pol, tol);
  };
  return {"eq1", spin_matrices(spin), {}, eval};
}

/// N [Var(J_s) + sum_n (j^2 - <(j_s^(n))^2>)] >= <J_t1>^2 + <J_t2>^2, valid
/// for separable spin-j states.
inline Criterion mapped_ssi_criterion(Spin spin, SsiAxes axes = {}, const Tolerances& tol = {}) {
  const double j = spin.value();
  auto eval = [axes, tol, j](const MomentTable& t) {
    const double n = static_cast<double>(t.n_particles);
    const auto s = static_cast<std::size_t>(axes.squeezed);
    const auto [a, b] = axes.transverse();
    const double pol = t.mean[a] * t.mean[a] + t.mean[b] * t.mean[b];
    const double lhs = n * (t.variance(s) + n * j * j - t.local_square_sum[s]);
    return detail::polarization_report("eq7", lhs, pol, tol);
  };
  return {"eq7", spin_matrices(spin), {}, eval};
}

// ---------------------------------------------------------------------------
// Criteria on SU(d) generators (any set with C = 2 and M = d^2 - 1).
// ---------------------------------------------------------------------------

namespace detail {

inline void require_sud_set(const ObservableSet& set) {
  const std::size_t d = set.local_dim;
  if (set.size() != d * d - 1 || std::abs(set.ortho_const - 2.0) > 1e-12) {
    throw InputError("criterion needs an SU(d) generator set with C = 2, got " + set.name);
  }
}

}  // namespace detail

/// sum_k Var(G_k) >= 2N(d-1).
inline Criterion sud_singlet_criterion(const ObservableSet& set, const Tolerances& tol = {}) {
  detail::require_sud_set(set);
  const double d = static_cast<double>(set.local_dim);
  auto eval = [d, tau = tol.violate](const MomentTable& t) {
    const double n = static_cast<double>(t.n_particles);
    std::vector<std::size_t> all(t.size());
    std::iota(all.begin(), all.end(), 0);
    return make_report("eq9", all, t.variance_sum(), 2.0 * n * (d - 1.0), tau);
  };
  return {"eq9", set, {}, eval};
}

inline Criterion sud_singlet_criterion(std::size_t d, const Tolerances& tol = {}) {
  return sud_singlet_criterion(gellmann_set(d), tol);
}

inline double two_producible_bound(std::size_t n, std::size_t d) {
  const double nn = static_cast<double>(n);
  return 2.0 * nn * (static_cast<double>(d) - 2.0) + ((n % 2 == 1) ? 2.0 : 0.0);
}

/// sum_k Var(G_k) >= 2N(d-2) (+2 for odd N); a violation needs 3-particle entanglement.
inline Criterion two_producible_criterion(const ObservableSet& set, const Tolerances& tol = {}) {
  detail::require_sud_set(set);
  const std::size_t d = set.local_dim;
  auto eval = [d, tau = tol.violate](const MomentTable& t) {
    std::vector<std::size_t> all(t.size());
    std::iota(all.begin(), all.end(), 0);
    return make_report("eq10", all, t.variance_sum(), two_producible_bound(t.n_particles, d), tau);
  };
  return {"eq10", set, {}, eval};
}

inline Criterion two_producible_criterion(std::size_t d, const Tolerances& tol = {}) {
  return two_producible_criterion(gellmann_set(d), tol);
}

/// sum_{k in I} [N modvar_k + <G_k>^2] >= 0. Only meaningful for
/// permutation-symmetric states; the state-level entry point enforces that.
inline Criterion symmetric_criterion(const ObservableSet& set, std::vector<std::size_t> index_set,
                                     const Tolerances& tol = {}) {
  index_set = normalize_index_set(std::move(index_set), set.size());
  auto eval = [index_set, tau = tol.violate](const MomentTable& t) {
    const double n = static_cast<double>(t.n_particles);
    double lhs = 0.0;
    for (const std::size_t k : index_set) lhs += n * t.mod_variance[k] + t.mean[k] * t.mean[k];
    return make_report("eq11", index_set, lhs, 0.0, tau);
  };
  return {"eq11", set, index_set, eval};
}

// ---------------------------------------------------------------------------
// State-level entry points.
// ---------------------------------------------------------------------------

inline CriterionReport evaluate(const Criterion& c, const DensityMatrix& rho, const CollectiveSet& collective) {
  return c.evaluate(moment_table(rho, collective));
}

inline CriterionReport evaluate(const Criterion& c, const DensityMatrix& rho) {
  return evaluate(c, rho, collectivize(c.set, rho.layout()));
}

inline CriterionReport general_ssi_margin(const DensityMatrix& rho, const CollectiveSet& collective,
                                          std::vector<std::size_t> index_set, const Tolerances& tol = {}) {
  return evaluate(general_ssi_criterion(collective.base, std::move(index_set), tol), rho, collective);
}

inline std::vector<CriterionReport> optimal_ssi_report(const DensityMatrix& rho, Spin spin,
                                                       const Tolerances& tol = {}) {
  if (spin.dim() != rho.layout().local_dim()) throw InputError("spin does not match local dimension");
  const auto collective = collectivize(spin_matrices(spin), rho.layout());
  const auto table = moment_table(rho, collective);
  std::vector<CriterionReport> out;
  for (const auto& c : optimal_ssi_criteria(spin, tol)) out.push_back(c.evaluate(table));
  return out;
}

inline CriterionReport standard_ssi_margin(const DensityMatrix& rho, Spin spin, SsiAxes axes = {},
                                           const Tolerances& tol = {}) {
  return evaluate(standard_ssi_criterion(spin, axes, tol), rho);
}

inline CriterionReport mapped_ssi_margin(const DensityMatrix& rho, Spin spin, SsiAxes axes = {},
                                         const Tolerances& tol = {}) {
  return evaluate(mapped_ssi_criterion(spin, axes, tol), rho);
}

inline CriterionReport sud_singlet_margin(const DensityMatrix& rho, const Tolerances& tol = {}) {
  return evaluate(sud_singlet_criterion(rho.layout().local_dim(), tol), rho);
}

inline CriterionReport two_producible_margin(const DensityMatrix& rho, const Tolerances& tol = {}) {
  return evaluate(two_producible_criterion(rho.layout().local_dim(), tol), rho);
}

inline CriterionReport symmetric_margin(const DensityMatrix& rho, const CollectiveSet& collective,
                                        std::vector<std::size_t> index_set, const Tolerances& tol = {}) {
  if (!is_permutation_symmetric(rho)) {
    throw InputError("symmetric-state criterion refused: state is not permutation symmetric");
  }
  return evaluate(symmetric_criterion(collective.base, std::move(index_set), tol), rho, collective);
}

// ---------------------------------------------------------------------------
// Qubit-to-spin-j transformation of criteria written in <J_l> and <J~_l^2>.
// ---------------------------------------------------------------------------

/// f(means, modified second moments, N) for spin-1/2 particles.
using QubitFunctional =
    std::function<double(const std::array<double, 3>&, const std::array<double, 3>&, std::size_t)>;

/// Substitutes <J_l> -> <J_l>/(2j) and <J~_l^2> -> <J~_l^2>/(4j^2). The caller
/// vouches that f is concave in its arguments; the result then bounds
/// separable spin-j states with the same constant.
inline std::function<double(const MomentTable&)> transform_qubit_criterion(QubitFunctional f, Spin spin) {
  const double j = spin.value();
  return [f = std::move(f), j](const MomentTable& t) {
    std::array<double, 3> means{}, second{};
    for (std::size_t l = 0; l < 3; ++l) {
      means[l] = t.mean[l] / (2.0 * j);
      second[l] = t.mod_second[l] / (4.0 * j * j);
    }
    return f(means, second, t.n_particles);
  };
}

/// The qubit inequality N Var(J_x) - <J_y>^2 - <J_z>^2 >= 0 rewritten in
/// means and modified second moments (for qubits <J_x^2> = <J~_x^2> + N/4).
inline double qubit_standard_ssi(const std::array<double, 3>& means, const std::array<double, 3>& second,
                                 std::size_t n_particles, SsiAxes axes = {}) {
  const double n = static_cast<double>(n_particles);
  const auto s = static_cast<std::size_t>(axes.squeezed);
  const auto [a, b] = axes.transverse();
  return n * (second[s] + 0.25 * n - means[s] * means[s]) - means[a] * means[a] - means[b] * means[b];
}

// ---------------------------------------------------------------------------
// White-noise tolerance.
// ---------------------------------------------------------------------------

/// Largest noise fraction for which a noisy SU(d) singlet still violates the
/// total-variance bound: d/(d+1).
inline double noise_threshold(std::size_t d) {
  const double dd = static_cast<double>(d);
  return dd / (dd + 1.0);
}

/// Same question for the spin-variance inequality on angular momentum singlets: 2/(d+1).
inline double spin_variance_noise_threshold(std::size_t d) { return 2.0 / (static_cast<double>(d) + 1.0); }

/// Brackets the first sign change of the criterion margin on the grid
/// p = i/steps, then bisects inside the bracket down to `tol`.
inline double noise_threshold_empirical(const DensityMatrix& base, const Criterion& criterion,
                                        std::size_t steps = 100, double tol = 1e-12) {
  if (steps < 1) throw InputError("noise grid needs at least one step");
  const auto collective = collectivize(criterion.set, base.layout());
  auto margin = [&](double p) { return evaluate(criterion, white_noise_mix(base, p), collective).margin; };
  if (margin(0.0) >= 0.0) throw InputError("state is not detected even without noise");
  double lo = 0.0;
  double hi = -1.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(steps);
    if (margin(p) >= 0.0) {
      hi = p;
      break;
    }
    lo = p;
  }
  if (hi < 0.0) return 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (margin(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace ssikit
