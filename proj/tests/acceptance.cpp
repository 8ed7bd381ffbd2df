// Acceptance gate: one PASS/FAIL line per criterion A1-A12, exit status 1 if
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "ssikit/io.hpp"

using namespace ssikit;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

OptimizationConfig config(std::size_t restarts, std::uint64_t seed) {
  OptimizationConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = seed;
  return cfg;
}

// ---------------------------------------------------------------------------

void a1(Outcome& o) {
  const auto checks = run_identities({2, 3, 4}, {Spin(1), Spin(2), Spin(3)});
  std::set<int> ids;
  std::size_t failed = 0;
  double worst_exact = 0.0;
  for (const auto& c : checks) {
    ids.insert(c.id);
    if (!c.passed) {
      ++failed;
      o.detail << " [check " << c.id << " " << c.params << " deviation " << c.deviation << "]";
    }
    if (c.tolerance <= 1e-10) worst_exact = std::max(worst_exact, c.deviation);
  }
  o.detail << checks.size() << " checks, " << ids.size() << " distinct ids, worst exact deviation " << worst_exact;
  o.require(failed == 0, "identity check failed");
  o.require(ids.size() == 18, "expected 18 distinct checks");
  o.require(worst_exact <= 1e-10, "exact deviation above 1e-10");
}

void a2(Outcome& o) {
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_name;
  std::size_t evaluations = 0;
  for (auto [n, d] : {std::pair<std::size_t, std::size_t>{2, 2}, {3, 2}, {2, 3}, {3, 3}, {2, 4}}) {
    const Layout l(n, d);
    const Spin spin = Spin::from_local_dim(d);
    const auto spin_set = spin_matrices(spin);
    const auto gm = gellmann_set(d);
    std::vector<Criterion> on_spin = optimal_ssi_criteria(spin);
    on_spin.push_back(mapped_ssi_criterion(spin));
    for (const auto& idx : all_index_sets(spin_set.size())) on_spin.push_back(general_ssi_criterion(spin_set, idx));
    std::vector<Criterion> on_gm{sud_singlet_criterion(gm), two_producible_criterion(gm)};
    std::vector<Criterion> symmetric_only;
    for (const auto& idx : canonical_index_sets(gm.size())) {
      on_gm.push_back(general_ssi_criterion(gm, idx));
      symmetric_only.push_back(symmetric_criterion(gm, idx));
    }
    const auto sc = collectivize(spin_set, l);
    const auto gc = collectivize(gm, l);
    Rng rng(1000 + 10 * n + d);
    auto track = [&](const CriterionReport& r) {
      ++evaluations;
      if (r.status == ReportStatus::ok && r.margin < worst) {
        worst = r.margin;
        worst_name = r.criterion + " N=" + std::to_string(n) + " d=" + std::to_string(d);
      }
    };
    for (int t = 0; t < 500; ++t) {
      const DensityMatrix rho(random_product(l, rng));
      const auto ts = moment_table(rho, sc);
      const auto tg = moment_table(rho, gc);
      for (const auto& c : on_spin) track(c.evaluate(ts));
      for (const auto& c : on_gm) track(c.evaluate(tg));
      // The symmetric-state inequality is only asserted for symmetric
      // states, so it is exercised on psi^(x N) products.
      const DensityMatrix sym(identical_product(random_locals(Layout(1, d), rng)[0], n));
      const auto tsym = moment_table(sym, gc);
      for (const auto& c : symmetric_only) track(c.evaluate(tsym));
    }
  }
  o.detail << evaluations << " margins, lowest " << worst << " (" << worst_name << ")";
  o.require(worst >= -1e-7, "margin below -1e-7");
}

void a3(Outcome& o) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t runs = 0;
  for (int twice = 1; twice <= 3; ++twice) {
    const Spin spin(twice);
    const auto set = spin_matrices(spin);
    for (std::size_t n : {2, 3}) {
      const Layout l(n, spin.dim());
      for (const auto& idx : all_index_sets(3)) {
        const double m = minimize_over_products(general_ssi_criterion(set, idx), l, config(16, 30 + runs)).min_margin;
        ++runs;
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        if (m < -1e-6 || m > 1e-3) {
          o.detail << " [j=" << spin.value() << " N=" << n << " |I|=" << idx.size() << " min " << m << "]";
        }
      }
    }
  }
  o.detail << runs << " minimizations, minima in [" << lo << ", " << hi << "]";
  o.require(lo >= -1e-6 && hi <= 1e-3, "minimum outside [-1e-6, 1e-3]");
}

void a4(Outcome& o) {
  Rng rng(404);
  double worst_qubit = 0.0, worst_lift = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 2);
    const auto qubits = random_locals(Layout(n, 2), rng);
    const DensityMatrix q(product_state(qubits));
    worst_qubit = std::max(worst_qubit, std::abs(evaluate(spin_variance_criterion(Spin(1)), q).margin));
    for (int twice : {2, 3}) {
      const DensityMatrix lifted(lift_qubit_product(qubits, Spin(twice)));
      worst_lift = std::max(worst_lift, std::abs(evaluate(spin_variance_criterion(Spin(twice)), lifted).margin));
    }
  }
  o.detail << "50 qubit products, max |margin| " << worst_qubit << " before lift, " << worst_lift << " after";
  o.require(worst_qubit <= 1e-6, "qubit products not saturating");
  o.require(worst_lift <= 1e-6, "lifted states not saturating");
}

void a5(Outcome& o) {
  const double s2 = evaluate(spin_variance_criterion(Spin(1)), sud_singlet(2, 2)).margin;
  const double s4 = evaluate(spin_variance_criterion(Spin(1)), spin_singlet(4, Spin(1))).margin;
  const double dk = evaluate(single_axis_squeezing_criterion(Spin(1), Axis::z), DensityMatrix(dicke_state(2, Spin(1)))).margin;
  const double su3 = sud_singlet_margin(sud_singlet(3, 3)).margin;
  o.detail << "singlet N=2 " << s2 << ", N=4 " << s4 << ", Dicke " << dk << ", SU(3) singlet " << su3;
  o.require(std::abs(s2 + 1.0) <= 1e-8, "singlet N=2");
  o.require(std::abs(s4 + 2.0) <= 1e-8, "singlet N=4");
  o.require(std::abs(dk + 1.0) <= 1e-8, "Dicke");
  o.require(std::abs(su3 + 12.0) <= 1e-8, "SU(3) singlet");
}

void a6(Outcome& o) {
  const Layout l(2, 3);
  const auto t0 = std::chrono::steady_clock::now();
  const auto standard = minimize_over_products(standard_ssi_criterion(Spin(2)), l, config(256, 6));
  const auto mapped = minimize_over_products(mapped_ssi_criterion(Spin(2)), l, config(256, 6));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const DensityMatrix witness(standard.argmin->assemble());
  const double mapped_at_witness = mapped_ssi_margin(witness, Spin(2)).margin;
  o.detail << "Eq1 min " << standard.min_margin << ", Eq7 at that state " << mapped_at_witness << ", Eq7 min "
           << mapped.min_margin << ", " << seconds << " s";
  o.require(standard.min_margin < -1e-4, "no separable Eq1 violation found");
  o.require(mapped_at_witness >= -1e-7, "Eq7 violated at the witness");
  o.require(mapped.min_margin >= -1e-7, "Eq7 violated by a product");
  o.require(seconds <= 300.0, "runtime above 5 min");
}

void a7(Outcome& o) {
  const double p2 = noise_threshold_empirical(sud_singlet(2, 2), sud_singlet_criterion(2));
  const double p3 = noise_threshold_empirical(sud_singlet(3, 3), sud_singlet_criterion(3));
  const double ps = noise_threshold_empirical(spin_singlet(2, Spin(2)), spin_variance_criterion(Spin(2)));
  o.detail << "p*(d=2) " << p2 << ", p*(d=3) " << p3 << ", spin-1 singlet " << ps;
  o.require(std::abs(p2 - noise_threshold(2)) <= 1e-6, "d=2 threshold");
  o.require(std::abs(p3 - noise_threshold(3)) <= 1e-6, "d=3 threshold");
  o.require(std::abs(ps - spin_variance_noise_threshold(3)) <= 1e-3, "spin-variance threshold");
}

void a8(Outcome& o) {
  for (auto [d, n] : {std::pair<std::size_t, std::size_t>{3, 2}, {3, 3}, {4, 2}}) {
    const auto c = two_producible_criterion(d);
    const auto r = minimize_over_two_producible(c, Layout(n, d), config(16, 80 + n + d));
    const double attained = r.min_margin + two_producible_bound(n, d);
    o.detail << "(d=" << d << ",N=" << n << ") min " << attained << " vs " << two_producible_bound(n, d) << "; ";
    o.require(std::abs(r.min_margin) <= 1e-3, "bound not attained");
  }
  const double singlet = two_producible_margin(sud_singlet(3, 3)).margin;
  o.detail << "SU(3) singlet " << singlet;
  o.require(std::abs(singlet + 8.0) <= 1e-8, "singlet margin");
}

void a9(Outcome& o) {
  Rng rng(909);
  std::size_t detected = 0, counterexamples = 0, beaten = 0, states = 0;
  const std::pair<std::size_t, std::size_t> shapes[] = {{2, 2}, {3, 2}, {4, 2}, {2, 3}, {3, 3}, {4, 3}};
  for (int t = 0; t < 200; ++t) {
    const auto [n, d] = shapes[t % 6];
    const Layout l(n, d);
    const Operator sym = symmetrizer(l);
    const DensityMatrix rho = (t / 6) % 2 == 0 ? DensityMatrix(random_symmetric_pure(l, rng, sym))
                                               : random_symmetric_density(l, rng, sym);
    const auto rep = symmetric_witness_test(rho, config(2, 900 + static_cast<std::uint64_t>(t)));
    ++states;
    if (rep.violation_found) {
      ++detected;
      if (!(rep.min_t1_av2 < -1e-9)) ++counterexamples;
    }
    if (rep.random_trial_beat_optimum) ++beaten;
  }
  o.detail << states << " symmetric states, " << detected << " violations, " << counterexamples
           << " without NPT pair state, " << beaten << " random remixes beat the spectral optimum";
  o.require(counterexamples == 0, "violation without NPT");
  o.require(beaten == 0, "spectral optimum beaten");
}

void a10(Outcome& o) {
  Rng rng(1010);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Spin spin(1 + t % 3);
    const std::size_t n = 2 + static_cast<std::size_t>(t % 2);
    const Layout l(n, spin.dim());
    const auto rho = random_density(l, rng);
    const auto sc = collectivize(spin_matrices(spin), l);
    const auto opt = optimal_ssi_report(rho, spin);
    worst = std::max(worst, std::abs(general_ssi_margin(rho, sc, {0, 1, 2}).margin - (double(n) - 1.0) * opt[1].margin));
    for (std::size_t m = 0; m < 3; ++m) {
      worst = std::max(worst, std::abs(general_ssi_margin(rho, sc, {m}).margin - opt[2 + m].margin));
      std::vector<std::size_t> kl;
      for (std::size_t k = 0; k < 3; ++k)
        if (k != m) kl.push_back(k);
      worst = std::max(worst, std::abs(general_ssi_margin(rho, sc, kl).margin - opt[5 + m].margin));
    }
    const std::size_t d = 2 + static_cast<std::size_t>(t % 3);
    const Layout lg(2, d);
    const auto rg = random_density(lg, rng);
    const auto gc = collectivize(gellmann_set(d), lg);
    std::vector<std::size_t> full(d * d - 1);
    std::iota(full.begin(), full.end(), 0);
    worst = std::max(worst, std::abs(general_ssi_margin(rg, gc, full).margin - sud_singlet_margin(rg).margin));
  }
  o.detail << "100 states per form, max disagreement " << worst;
  o.require(worst <= 1e-10, "forms disagree");
}

void a11(Outcome& o) {
  const Layout l(3, 3);
  const auto h = build_hamiltonian(HamiltonianKind::sum_gk_squared, l);
  const auto ends = thermal_scan(h, l, {0.01, 1e9}, {sud_singlet_criterion(3)});
  o.detail << "T=0.01: " << classification_name(ends[0].classification) << " margin " << ends[0].reports[0].margin
           << "; T=1e9: " << classification_name(ends[1].classification);
  o.require(ends[0].classification == Classification::npt_entangled, "cold state not NPT-entangled");
  o.require(std::abs(ends[0].reports[0].margin + 12.0) <= 1e-4, "cold margin");
  o.require(ends[1].classification == Classification::separable_consistent, "hot state not separable-consistent");

  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.01 * std::pow(10.0, i * 0.1));
  const auto rows = thermal_scan(h, l, grid, {sud_singlet_criterion(3)});
  std::size_t candidates = 0;
  for (const auto& row : rows) {
    if (row.classification != Classification::bound_entanglement_candidate) continue;
    ++candidates;
    std::cout << "  candidate T=" << row.param << " margin " << row.reports[0].margin;
    for (std::size_t c = 0; c < row.cuts.size(); ++c) std::cout << " cut" << c << " min_eig " << row.min_t1[c];
    std::cout << "\n";
  }
  o.detail << "; " << candidates << " PPT-and-violating rows on a 41-point grid";
}

/// Deterministic report content: scan, optimizer and evaluation output.
std::string report_snapshot() {
  json out;
  out["scan"] = scan_to_json(noise_scan(sud_singlet(3, 3), linear_grid(0.0, 1.0, 11), {sud_singlet_criterion(3)}));
  const auto c = standard_ssi_criterion(Spin(2));
  out["optimize"] = optimization_to_json(c, minimize_over_products(c, Layout(2, 3), config(8, 12)), false);
  out["reports"] = reports_to_json(evaluate_all(optimal_ssi_criteria(Spin(2)), random_density(Layout(3, 3), 5)));
  IdentityOptions opt;
  opt.samples = 10;
  out["identities"] = identities_to_json(run_identities({3}, {Spin(2)}, opt));
  return out.dump();
}

void a12(Outcome& o) {
  const std::string first = report_snapshot();
  const std::string second = report_snapshot();
  std::ofstream("acceptance_report.json") << first << "\n";
  o.detail << "two runs, " << first.size() << " bytes each, written to acceptance_report.json";
  o.require(first == second, "reports differ");
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Outcome&)>> items[] = {
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4},   {"A5", a5},   {"A6", a6},
      {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10}, {"A11", a11}, {"A12", a12}};
  int failures = 0;
  for (const auto& [name, fn] : items) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << name << (o.pass ? " PASS " : " FAIL ") << o.detail.str() << " (" << s << " s)" << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
