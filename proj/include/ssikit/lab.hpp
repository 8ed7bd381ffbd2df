#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssikit/criteria.hpp"

namespace ssikit {

struct OptimizationConfig {
  std::size_t restarts = 64;
  std::size_t max_sweeps = 200;
  double tol_improve = 1e-10;
  std::uint64_t seed = 0;

  void validate() const {
    if (restarts < 1) throw InputError("optimizer needs at least one restart");
    if (!(tol_improve > 0.0)) throw InputError("optimizer tolerance must be positive");
  }
};

/// A group of sites carrying one pure state. `subspace`, when nonempty, is an
/// isometry restricting the block state to its column span.
struct Block {
  std::vector<std::size_t> sites;
  Matrix subspace;
  std::string label;
};

/// Pure state that factorizes over disjoint blocks of sites.
struct BlockProduct {
  Layout layout;
  std::vector<Block> blocks;
  std::vector<Vector> coords;  ///< per block, coordinates inside the (sub)space

  Vector block_vector(std::size_t b) const {
    return blocks[b].subspace.size() == 0 ? coords[b] : Vector(blocks[b].subspace * coords[b]);
  }

  PureState assemble() const {
    Vector psi = Vector::Ones(static_cast<Eigen::Index>(layout.dim()));
    const std::size_t d = layout.local_dim();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const Vector v = block_vector(b);
      for (std::size_t i = 0; i < layout.dim(); ++i) {
        std::size_t local = 0;
        for (const std::size_t s : blocks[b].sites) local = local * d + layout.digit(i, s);
        psi(static_cast<Eigen::Index>(i)) *= v(static_cast<Eigen::Index>(local));
      }
    }
    return PureState(layout, psi);
  }
};

namespace detail {

/// Per-block operators for one observable set, already projected into the
/// block's subspace: A_k^b, (A_k^b)^2 and sum_{n in b} (a_k^(n))^2.
struct BlockOperators {
  std::vector<Operator> a;
  std::vector<Operator> a_sq;
  std::vector<Operator> loc_sq;
};

inline BlockOperators block_operators(const ObservableSet& set, const Block& block, std::size_t cap) {
  Layout local(block.sites.size(), set.local_dim, cap);
  const auto dim = static_cast<Eigen::Index>(local.dim());
  BlockOperators out;
  for (const auto& a : set.ops) {
    Operator total = Operator::Zero(dim, dim);
    Operator squares = Operator::Zero(dim, dim);
    const Operator a2 = a * a;
    for (std::size_t n = 0; n < local.n_particles(); ++n) {
      total += embed(a, n, local);
      squares += embed(a2, n, local);
    }
    Operator total_sq = total * total;
    if (block.subspace.size() != 0) {
      const Matrix& v = block.subspace;
      total = v.adjoint() * total * v;
      total_sq = v.adjoint() * total_sq * v;
      squares = v.adjoint() * squares * v;
    }
    out.a.push_back(std::move(total));
    out.a_sq.push_back(std::move(total_sq));
    out.loc_sq.push_back(std::move(squares));
  }
  return out;
}

struct BlockMoments {
  std::vector<double> x;  ///< <A_k^b>
  std::vector<double> q;  ///< <(A_k^b)^2>
  std::vector<double> l;  ///< <L_k^b>
};

inline BlockMoments block_moments(const BlockOperators& ops, const Vector& c) {
  BlockMoments m;
  for (std::size_t k = 0; k < ops.a.size(); ++k) {
    m.x.push_back(c.dot(ops.a[k] * c).real());
    m.q.push_back(c.dot(ops.a_sq[k] * c).real());
    m.l.push_back(c.dot(ops.loc_sq[k] * c).real());
  }
  return m;
}

/// Collective moments of a block product: cross terms between different
/// blocks factorize into products of block means.
inline MomentTable combine_block_moments(const std::vector<BlockMoments>& blocks, std::size_t n_particles) {
  const std::size_t m = blocks.front().x.size();
  std::vector<double> mean(m, 0.0), raw(m, 0.0), loc(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double sum_sq = 0.0;
    for (const auto& b : blocks) {
      mean[k] += b.x[k];
      raw[k] += b.q[k];
      loc[k] += b.l[k];
      sum_sq += b.x[k] * b.x[k];
    }
    raw[k] += mean[k] * mean[k] - sum_sq;
  }
  return MomentTable::from_moments(n_particles, mean, raw, loc);
}

struct MomentGradient {
  std::vector<double> mean, raw, loc;
};

/// Central differences of the margin with respect to the three independent
/// moment families. Criteria are at most quadratic in the moments, so the
/// differences are exact up to rounding.
inline MomentGradient margin_gradient(const Criterion& c, const MomentTable& t) {
  const double h = 1e-3;
  MomentGradient g;
  auto diff = [&](int family, std::size_t k) {
    auto plus = t, minus = t;
    auto& vp = family == 0 ? plus.mean : family == 1 ? plus.raw_second : plus.local_square_sum;
    auto& vm = family == 0 ? minus.mean : family == 1 ? minus.raw_second : minus.local_square_sum;
    vp[k] += h;
    vm[k] -= h;
    plus = MomentTable::from_moments(t.n_particles, plus.mean, plus.raw_second, plus.local_square_sum);
    minus = MomentTable::from_moments(t.n_particles, minus.mean, minus.raw_second, minus.local_square_sum);
    return (c.margin(plus) - c.margin(minus)) / (2.0 * h);
  };
  for (std::size_t k = 0; k < t.size(); ++k) {
    g.mean.push_back(diff(0, k));
    g.raw.push_back(diff(1, k));
    g.loc.push_back(diff(2, k));
  }
  return g;
}

inline Vector random_unit(Eigen::Index dim, Rng& rng) {
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  return v.normalized();
}

struct SeeSawRun {
  double margin;
  std::vector<Vector> coords;
  std::size_t sweeps;
  bool converged;
};

/// Coordinate descent over blocks. Each step moves one block to the lowest
/// eigenvector of the linearized objective (a majorization step for the
/// concave-in-expectations criteria), with a backtracking fallback so the
/// margin never increases.
inline SeeSawRun see_saw(const Criterion& c, const std::vector<BlockOperators>& ops,
                         std::vector<Vector> coords, std::size_t n_particles, const OptimizationConfig& cfg) {
  const std::size_t nb = ops.size();
  std::vector<BlockMoments> moments(nb);
  for (std::size_t b = 0; b < nb; ++b) moments[b] = block_moments(ops[b], coords[b]);
  double f = c.margin(combine_block_moments(moments, n_particles));

  std::size_t sweep = 0;
  bool converged = false;
  for (; sweep < cfg.max_sweeps; ++sweep) {
    const double f_start = f;
    for (std::size_t b = 0; b < nb; ++b) {
      const auto table = combine_block_moments(moments, n_particles);
      const auto grad = margin_gradient(c, table);
      const auto& op = ops[b];
      const auto dim = op.a.front().rows();
      Operator h = Operator::Zero(dim, dim);
      for (std::size_t k = 0; k < op.a.size(); ++k) {
        const double others = table.mean[k] - moments[b].x[k];
        h += (grad.mean[k] + 2.0 * grad.raw[k] * others) * op.a[k];
        h += grad.raw[k] * op.a_sq[k] + grad.loc[k] * op.loc_sq[k];
      }
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
      Vector proposal = es.eigenvectors().col(0);
      const cplx overlap = coords[b].dot(proposal);
      if (std::abs(overlap) > 1e-14) proposal *= std::conj(overlap) / std::abs(overlap);

      auto try_point = [&](const Vector& cand) {
        auto trial = moments;
        trial[b] = block_moments(op, cand);
        return std::pair{c.margin(combine_block_moments(trial, n_particles)), trial[b]};
      };
      double t = 1.0;
      for (int attempt = 0; attempt < 20; ++attempt, t *= 0.5) {
        const Vector cand = ((1.0 - t) * coords[b] + t * proposal).normalized();
        const auto [value, bm] = try_point(cand);
        if (value < f) {
          f = value;
          coords[b] = cand;
          moments[b] = bm;
          break;
        }
      }
    }
    if (f_start - f < cfg.tol_improve) {
      converged = true;
      ++sweep;
      break;
    }
  }
  return {f, std::move(coords), sweep, converged};
}

}  // namespace detail

struct OptimizationResult {
  double min_margin = std::numeric_limits<double>::infinity();
  std::optional<BlockProduct> argmin;
  std::size_t best_restart = 0;
  std::size_t restarts_run = 0;
  std::size_t sweeps = 0;
  bool converged = false;
  std::string structure;  ///< block layout of the minimizer, e.g. "(0,1)(2)"
};

namespace detail {

inline std::string describe_blocks(const std::vector<Block>& blocks) {
  std::string s;
  for (const auto& b : blocks) {
    s += "(";
    for (std::size_t i = 0; i < b.sites.size(); ++i) s += (i ? "," : "") + std::to_string(b.sites[i]);
    s += ")";
    if (!b.label.empty()) s += b.label;
  }
  return s;
}

/// Runs `restarts` seeded see-saw descents on a fixed block structure and
/// folds them into `best` (strictly better by tol_improve wins; ties keep the
/// earlier restart).
inline void optimize_structure(const Criterion& c, const Layout& layout, const std::vector<Block>& blocks,
                               const OptimizationConfig& cfg, std::size_t restarts, OptimizationResult& best) {
  std::vector<BlockOperators> ops;
  for (const auto& b : blocks) ops.push_back(block_operators(c.set, b, layout.cap()));
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(cfg.seed + r);
    std::vector<Vector> init;
    for (const auto& op : ops) init.push_back(random_unit(op.a.front().rows(), rng));
    auto run = see_saw(c, ops, std::move(init), layout.n_particles(), cfg);
    ++best.restarts_run;
    if (run.margin < best.min_margin - cfg.tol_improve || !best.argmin) {
      best.min_margin = run.margin;
      best.argmin = BlockProduct{layout, blocks, std::move(run.coords)};
      best.best_restart = r;
      best.sweeps = run.sweeps;
      best.converged = run.converged;
      best.structure = describe_blocks(blocks);
    }
  }
}

}  // namespace detail

/// Minimizes a criterion margin over fully product pure states (and hence, by
/// linearity of the bound in the mixture weights, the separable bound check).
inline OptimizationResult minimize_over_products(const Criterion& c, const Layout& layout,
                                                 const OptimizationConfig& cfg = {}) {
  cfg.validate();
  if (c.set.local_dim != layout.local_dim()) throw InputError("criterion set does not match layout");
  std::vector<Block> blocks;
  for (std::size_t n = 0; n < layout.n_particles(); ++n) blocks.push_back({{n}, Matrix(), ""});
  OptimizationResult best;
  detail::optimize_structure(c, layout, blocks, cfg, cfg.restarts, best);
  return best;
}

/// Every partition of {0..n-1} into blocks of one or two sites.
inline std::vector<std::vector<std::vector<std::size_t>>> pairings(std::size_t n) {
  std::vector<std::vector<std::vector<std::size_t>>> out;
  std::vector<std::vector<std::size_t>> current;
  std::vector<bool> used(n, false);
  std::function<void()> rec = [&]() {
    std::size_t first = 0;
    while (first < n && used[first]) ++first;
    if (first == n) {
      out.push_back(current);
      return;
    }
    used[first] = true;
    current.push_back({first});
    rec();
    current.pop_back();
    for (std::size_t other = first + 1; other < n; ++other) {
      if (used[other]) continue;
      used[other] = true;
      current.push_back({first, other});
      rec();
      current.pop_back();
      used[other] = false;
    }
    used[first] = false;
  };
  rec();
  return out;
}

/// Minimizes over products of pair and single-site pure states. After the
/// unrestricted pass, every pair block is re-optimized inside the symmetric
/// and the antisymmetric subspace separately (all combinations).
inline OptimizationResult minimize_over_two_producible(const Criterion& c, const Layout& layout,
                                                       const OptimizationConfig& cfg = {}) {
  cfg.validate();
  if (layout.n_particles() > 6) throw InputError("two-producible search limited to N <= 6");
  if (c.set.local_dim != layout.local_dim()) throw InputError("criterion set does not match layout");
  const std::size_t d = layout.local_dim();
  const auto proj = sym_antisym_projectors(Layout(2, d, layout.cap()));
  auto range_basis = [](const Operator& p) {
    const auto eig = herm_eig(p);
    Eigen::Index first = 0;
    while (first < eig.values.size() && eig.values(first) < 0.5) ++first;
    return Matrix(eig.vectors.rightCols(eig.values.size() - first));
  };
  const Matrix sym_basis = range_basis(proj.symmetric);
  const Matrix anti_basis = range_basis(proj.antisymmetric);

  OptimizationResult best;
  const std::size_t refine_restarts = std::max<std::size_t>(1, cfg.restarts / 4);
  for (const auto& parts : pairings(layout.n_particles())) {
    std::vector<Block> blocks;
    std::vector<std::size_t> pair_index;
    for (const auto& sites : parts) {
      if (sites.size() == 2) pair_index.push_back(blocks.size());
      blocks.push_back({sites, Matrix(), ""});
    }
    detail::optimize_structure(c, layout, blocks, cfg, cfg.restarts, best);
    for (std::size_t mask = 0; mask < (std::size_t{1} << pair_index.size()); ++mask) {
      auto restricted = blocks;
      for (std::size_t p = 0; p < pair_index.size(); ++p) {
        const bool anti = (mask >> p) & 1U;
        restricted[pair_index[p]].subspace = anti ? anti_basis : sym_basis;
        restricted[pair_index[p]].label = anti ? "a" : "s";
      }
      if (!pair_index.empty()) detail::optimize_structure(c, layout, restricted, cfg, refine_restarts, best);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Partial transposition.
// ---------------------------------------------------------------------------

inline double ppt_min_eigenvalue(const DensityMatrix& rho, std::span<const std::size_t> sites) {
  if (sites.empty() || sites.size() >= rho.layout().n_particles()) {
    throw InputError("bipartition must be a nonempty proper subset of sites");
  }
  return min_eigenvalue(partial_transpose(rho, sites));
}

/// Inequivalent cuts, each given by the side that gets transposed. Exhaustive
/// (site 0 on the transposed side) for N <= 6; otherwise the 1- and 2-site cuts.
inline std::vector<std::vector<std::size_t>> bipartitions(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  if (n < 2) return out;
  if (n <= 6) {
    for (std::size_t mask = 1; mask < (std::size_t{1} << n) - 1; ++mask) {
      if (!(mask & 1U)) continue;
      std::vector<std::size_t> s;
      for (std::size_t k = 0; k < n; ++k) {
        if (mask & (std::size_t{1} << k)) s.push_back(k);
      }
      out.push_back(std::move(s));
    }
    return out;
  }
  for (std::size_t a = 0; a < n; ++a) out.push_back({a});
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) out.push_back({a, b});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symmetric states: collective criteria versus PPT of the averaged pair state.
// ---------------------------------------------------------------------------

struct SymmetricWitnessReport {
  double min_t1_av2 = 0.0;
  bool npt = false;
  bool violation_found = false;
  double best_margin = 0.0;            ///< lowest symmetric-criterion margin found
  std::vector<std::size_t> index_set;  ///< index set realizing best_margin
  RealMatrix mixing;                   ///< rows define the generators g'_k = sum_l O_kl g_l
  double predicted_margin = 0.0;       ///< N^2(N-1) * (sum of negative pair-form eigenvalues)
  double canonical_min_margin = 0.0;   ///< lowest margin with plain Gell-Mann generators, canonical I
  std::size_t random_trials = 0;
  bool random_trial_beat_optimum = false;
  bool forward_consistent = true;  ///< a violation found implies NPT average pair state
};

/// Exact search for the best generator choice. For a symmetric state each
/// generator contributes N^2(N-1)[<o x o> - <o x 1>^2] with o the remixed
/// generator and expectations in the averaged pair state. This is a quadratic
/// form in the mixing coefficients, so the optimal orthogonal remix is its
/// eigenbasis and the optimal I collects the negative eigenvalues.
inline SymmetricWitnessReport symmetric_witness_test(const DensityMatrix& rho, const OptimizationConfig& cfg = {},
                                                     const Tolerances& tol = {}) {
  if (!is_permutation_symmetric(rho)) throw InputError("symmetric-state test needs a permutation-symmetric state");
  const auto& layout = rho.layout();
  const std::size_t n = layout.n_particles();
  const std::size_t d = layout.local_dim();
  const double nn = static_cast<double>(n);
  SymmetricWitnessReport rep;

  const auto av2 = average_two_particle_state(rho);
  const std::size_t first[] = {0};
  rep.min_t1_av2 = min_eigenvalue(partial_transpose(av2, first));
  rep.npt = rep.min_t1_av2 < -tol.psd;

  const auto gm = gellmann_set(d);
  const auto m = static_cast<Eigen::Index>(gm.size());
  const Operator id = Operator::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  RealVector local_mean(m);
  RealMatrix pair_form(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    local_mean(k) = expectation(av2, kron(gm.ops[static_cast<std::size_t>(k)], id));
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      const Operator kl = kron(gm.ops[static_cast<std::size_t>(k)], gm.ops[static_cast<std::size_t>(l)]);
      pair_form(k, l) = av2.matrix().cwiseProduct(kl.transpose()).sum().real();
    }
  }
  pair_form = 0.5 * (pair_form + pair_form.transpose()) - local_mean * local_mean.transpose();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(pair_form);
  rep.mixing = es.eigenvectors().transpose();
  for (Eigen::Index k = 0; k < m; ++k) {
    if (es.eigenvalues()(k) < 0.0) {
      rep.index_set.push_back(static_cast<std::size_t>(k));
      rep.predicted_margin += nn * nn * (nn - 1.0) * es.eigenvalues()(k);
    }
  }

  // Evaluate the chosen generators on the full N-particle state.
  const Matrix unit = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const auto remixed = remixed_set(gm, rep.mixing, unit);
  const auto collective = collectivize(remixed, layout);
  const auto table = moment_table(rho, collective);
  rep.best_margin = symmetric_criterion(remixed, rep.index_set, tol).margin(table);

  const auto plain = moment_table(rho, collectivize(gm, layout));
  rep.canonical_min_margin = std::numeric_limits<double>::infinity();
  for (const auto& s : canonical_index_sets(gm.size())) {
    rep.canonical_min_margin = std::min(rep.canonical_min_margin, symmetric_criterion(gm, s, tol).margin(plain));
  }
  rep.best_margin = std::min(rep.best_margin, rep.canonical_min_margin);

  // Random generator choices (O, U) must never beat the spectral optimum.
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    Rng rng(cfg.seed + r);
    RealMatrix g(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) g(i, j) = rng.normal();
    }
    const RealMatrix o = Eigen::HouseholderQR<RealMatrix>(g).householderQ();
    Matrix z(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = rng.complex_normal();
    }
    const Matrix u = Eigen::HouseholderQR<Matrix>(z).householderQ();
    const auto trial_set = remixed_set(gm, o, u);
    const auto t = moment_table(rho, collectivize(trial_set, layout));
    double trial = 0.0;
    for (std::size_t k = 0; k < trial_set.size(); ++k) {
      trial += std::min(0.0, nn * t.mod_variance[k] + t.mean[k] * t.mean[k]);
    }
    ++rep.random_trials;
    if (trial < rep.predicted_margin - 1e-8) rep.random_trial_beat_optimum = true;
  }

  rep.violation_found = rep.best_margin < -tol.violate;
  rep.forward_consistent = !rep.violation_found || rep.min_t1_av2 < 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Parameter scans with PPT classification.
// ---------------------------------------------------------------------------

enum class Classification { separable_consistent, npt_entangled, bound_entanglement_candidate, undetected };

inline const char* classification_name(Classification c) {
  switch (c) {
    case Classification::separable_consistent: return "separable-consistent";
    case Classification::npt_entangled: return "NPT-entangled";
    case Classification::bound_entanglement_candidate: return "PPT-and-violating";
    case Classification::undetected: return "undetected";
  }
  return "?";
}

struct ScanRow {
  double param = 0.0;
  std::vector<CriterionReport> reports;
  std::vector<std::vector<std::size_t>> cuts;
  std::vector<double> min_t1;  ///< per cut
  Classification classification = Classification::separable_consistent;

  double min_t1_overall() const {
    double m = std::numeric_limits<double>::infinity();
    for (const double v : min_t1) m = std::min(m, v);
    return m;
  }
};

/// NPT and violated -> NPT-entangled; NPT but nothing violated -> undetected;
/// PPT on every cut yet violated -> bound-entanglement candidate.
inline Classification classify(const std::vector<CriterionReport>& reports, const std::vector<double>& min_t1,
                               const Tolerances& tol = {}) {
  bool npt = false;
  for (const double v : min_t1) npt = npt || v < -tol.psd;
  bool violated = false;
  for (const auto& r : reports) violated = violated || (r.status == ReportStatus::ok && r.margin < -tol.violate);
  if (npt) return violated ? Classification::npt_entangled : Classification::undetected;
  return violated ? Classification::bound_entanglement_candidate : Classification::separable_consistent;
}

namespace detail {

struct CriterionBank {
  std::vector<Criterion> criteria;
  std::map<std::string, CollectiveSet> collectives;

  CriterionBank(std::vector<Criterion> cs, const Layout& layout) : criteria(std::move(cs)) {
    for (const auto& c : criteria) {
      if (!collectives.count(c.set.name)) collectives.emplace(c.set.name, collectivize(c.set, layout));
    }
  }

  std::vector<CriterionReport> evaluate_all(const DensityMatrix& rho) const {
    std::map<std::string, MomentTable> tables;
    std::vector<CriterionReport> out;
    for (const auto& c : criteria) {
      auto it = tables.find(c.set.name);
      if (it == tables.end()) it = tables.emplace(c.set.name, moment_table(rho, collectives.at(c.set.name))).first;
      out.push_back(c.evaluate(it->second));
    }
    return out;
  }
};

inline ScanRow scan_row(double param, const DensityMatrix& rho, const CriterionBank& bank, const Tolerances& tol) {
  ScanRow row;
  row.param = param;
  row.reports = bank.evaluate_all(rho);
  row.cuts = bipartitions(rho.layout().n_particles());
  for (const auto& cut : row.cuts) row.min_t1.push_back(ppt_min_eigenvalue(rho, cut));
  row.classification = classify(row.reports, row.min_t1, tol);
  return row;
}

}  // namespace detail

/// `steps` equally spaced values from `from` to `to`; a single step yields {from}.
inline std::vector<double> linear_grid(double from, double to, std::size_t steps) {
  if (steps < 1) throw InputError("grid needs at least one step");
  std::vector<double> g;
  for (std::size_t i = 0; i < steps; ++i) {
    g.push_back(steps == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return g;
}

enum class HamiltonianKind { sum_gk_squared, sum_j_squared };

inline HamiltonianKind parse_hamiltonian(const std::string& s) {
  if (s == "sum-Gk2") return HamiltonianKind::sum_gk_squared;
  if (s == "sum-J2") return HamiltonianKind::sum_j_squared;
  throw InputError("unknown Hamiltonian '" + s + "' (expected sum-Gk2 or sum-J2)");
}

inline Operator build_hamiltonian(HamiltonianKind kind, const Layout& layout) {
  if (kind == HamiltonianKind::sum_gk_squared) return sud_sum_of_squares_from_flips(layout);
  return sum_of_squares(collectivize(spin_matrices(Spin::from_local_dim(layout.local_dim())), layout));
}

inline std::vector<ScanRow> thermal_scan(const Operator& hamiltonian, const Layout& layout,
                                         const std::vector<double>& temperatures, std::vector<Criterion> criteria,
                                         const Tolerances& tol = {}) {
  if (temperatures.empty()) throw InputError("temperature grid is empty");
  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    if (!(temperatures[i] > 0.0)) throw InputError("temperatures must be positive");
    if (i > 0 && temperatures[i] < temperatures[i - 1]) throw InputError("temperature grid must be ascending");
  }
  const detail::CriterionBank bank(std::move(criteria), layout);
  std::vector<ScanRow> rows;
  for (const double t : temperatures) rows.push_back(detail::scan_row(t, thermal_state(hamiltonian, layout, t), bank, tol));
  return rows;
}

inline std::vector<ScanRow> noise_scan(const DensityMatrix& base, const std::vector<double>& noise,
                                       std::vector<Criterion> criteria, const Tolerances& tol = {}) {
  for (const double p : noise) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("noise grid must lie inside [0, 1]");
  }
  const detail::CriterionBank bank(std::move(criteria), base.layout());
  std::vector<ScanRow> rows;
  for (const double p : noise) rows.push_back(detail::scan_row(p, white_noise_mix(base, p), bank, tol));
  return rows;
}

}  // namespace ssikit
