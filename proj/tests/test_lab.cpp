#include <catch2/catch_amalgamated.hpp>

#include "ssikit/lab.hpp"
#include "support.hpp"

using namespace ssikit;
using Catch::Matchers::WithinAbs;

namespace {

// A quadratic test objective on two qubits. For a product of Bloch vectors a, b
// it reduces to a_x b_x / 2 + 0.15 (a_z + b_z) - (a_y + b_y)^2 / 8.
Criterion custom_criterion() {
  auto eval = [](const MomentTable& t) {
    return make_report("custom", {}, t.mod_second[0] + 0.3 * t.mean[2] - 0.5 * t.mean[1] * t.mean[1], 0.0, 1e-7);
  };
  return {"custom", spin_matrices(Spin(1)), {}, eval};
}

double custom_on_bloch(double t1, double p1, double t2, double p2) {
  const double ax = std::sin(t1) * std::cos(p1), ay = std::sin(t1) * std::sin(p1), az = std::cos(t1);
  const double bx = std::sin(t2) * std::cos(p2), by = std::sin(t2) * std::sin(p2), bz = std::cos(t2);
  return ax * bx / 2.0 + 0.15 * (az + bz) - (ay + by) * (ay + by) / 8.0;
}

/// Coarse grid over both spheres, then shrinking-step pattern search.
double grid_minimum() {
  const int nt = 36, np = 72;
  const double pi = 3.141592653589793;
  std::vector<std::array<double, 2>> angles;
  std::vector<std::array<double, 3>> bloch;
  for (int i = 0; i <= nt; ++i)
    for (int j = 0; j < np; ++j) {
      const double t = pi * i / nt, p = 2 * pi * j / np;
      angles.push_back({t, p});
      bloch.push_back({std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)});
    }
  std::array<double, 4> best{};
  double f = 1e9;
  for (std::size_t u = 0; u < bloch.size(); ++u)
    for (std::size_t v = 0; v < bloch.size(); ++v) {
      const auto& a = bloch[u];
      const auto& b = bloch[v];
      const double val = a[0] * b[0] / 2.0 + 0.15 * (a[2] + b[2]) - (a[1] + b[1]) * (a[1] + b[1]) / 8.0;
      if (val < f) {
        f = val;
        best = {angles[u][0], angles[u][1], angles[v][0], angles[v][1]};
      }
    }
  for (double step = 0.05; step > 1e-9; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (int c = 0; c < 4; ++c) {
        for (double s : {step, -step}) {
          auto x = best;
          x[c] += s;
          const double v = custom_on_bloch(x[0], x[1], x[2], x[3]);
          if (v < f - 1e-15) {
            f = v;
            best = x;
            moved = true;
          }
        }
      }
    }
  }
  return f;
}

OptimizationConfig config(std::size_t restarts, std::uint64_t seed = 1) {
  OptimizationConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("product optimizer matches a brute-force Bloch-sphere search") {
  const double oracle_min = grid_minimum();
  const auto res = minimize_over_products(custom_criterion(), Layout(2, 2), config(16));
  CHECK_THAT(res.min_margin, WithinAbs(oracle_min, 1e-4));
  CHECK(res.min_margin >= oracle_min - 1e-9);
}

TEST_CASE("minimizer state reproduces the reported minimum") {
  const Layout l(2, 3);
  const auto res = minimize_over_products(mapped_ssi_criterion(Spin(2)), l, config(8));
  REQUIRE(res.argmin.has_value());
  const DensityMatrix rho(res.argmin->assemble());
  CHECK_THAT(mapped_ssi_margin(rho, Spin(2)).margin, WithinAbs(res.min_margin, 1e-9));
  CHECK(res.structure == "(0)(1)");
  CHECK(res.restarts_run == 8);
}

TEST_CASE("separable minima of valid bounds are non-negative") {
  for (int twice = 1; twice <= 3; ++twice) {
    const Spin spin(twice);
    const Layout l(2, spin.dim());
    for (const auto& c : optimal_ssi_criteria(spin)) {
      INFO(c.id << " j=" << spin.value());
      CHECK(minimize_over_products(c, l, config(8)).min_margin >= -1e-7);
    }
    CHECK(minimize_over_products(mapped_ssi_criterion(spin), l, config(8)).min_margin >= -1e-7);
  }
  // Every pure product saturates the SU(d) total-variance bound.
  CHECK_THAT(minimize_over_products(sud_singlet_criterion(3), Layout(2, 3), config(4)).min_margin,
             WithinAbs(0.0, 1e-8));
}

TEST_CASE("the standard inequality fails for separable spin-1 states, the mapped one does not") {
  const Layout l(2, 3);
  const double standard = minimize_over_products(standard_ssi_criterion(Spin(2)), l, config(32)).min_margin;
  const double mapped = minimize_over_products(mapped_ssi_criterion(Spin(2)), l, config(32)).min_margin;
  CHECK(standard < -1.0);
  CHECK(mapped >= -1e-7);
}

TEST_CASE("two-producible minima") {
  const auto c = two_producible_criterion(3);
  CHECK_THAT(minimize_over_two_producible(c, Layout(2, 3), config(8)).min_margin, WithinAbs(0.0, 1e-7));
  const auto r3 = minimize_over_two_producible(c, Layout(3, 3), config(4));
  CHECK(r3.min_margin >= -1e-7);
  CHECK_THROWS_AS(minimize_over_two_producible(c, Layout(7, 2), config(1)), InputError);
}

TEST_CASE("pairings and bipartitions") {
  CHECK(pairings(1).size() == 1);
  CHECK(pairings(3).size() == 4);
  CHECK(pairings(4).size() == 10);
  CHECK(pairings(5).size() == 26);
  CHECK(bipartitions(3).size() == 3);
  CHECK(bipartitions(4).size() == 7);
  CHECK(bipartitions(7).size() == 28);
  for (const auto& cut : bipartitions(5)) CHECK(cut.front() == 0);
}

TEST_CASE("PPT test on a Bell pair and a product") {
  const std::size_t first[] = {0};
  CHECK_THAT(ppt_min_eigenvalue(sud_singlet(2, 2), first), WithinAbs(-0.5, 1e-12));
  CHECK(ppt_min_eigenvalue(maximally_mixed(Layout(2, 2)), first) > 0.0);
  const std::size_t none[] = {0, 1};
  CHECK_THROWS_AS(ppt_min_eigenvalue(sud_singlet(2, 2), std::span<const std::size_t>()), InputError);
  CHECK_THROWS_AS(ppt_min_eigenvalue(sud_singlet(2, 2), none), InputError);
}

TEST_CASE("symmetric witness on a Dicke state") {
  const DensityMatrix dicke(dicke_state(2, Spin(1)));
  const auto rep = symmetric_witness_test(dicke, config(20));
  CHECK(rep.npt);
  CHECK(rep.violation_found);
  CHECK(rep.forward_consistent);
  CHECK_FALSE(rep.random_trial_beat_optimum);
  CHECK(rep.random_trials == 20);
  CHECK(rep.best_margin <= -4.0 + 1e-9);
  CHECK(rep.predicted_margin <= rep.canonical_min_margin + 1e-9);
  CHECK(rep.index_set.size() >= 1);
}

TEST_CASE("symmetric witness on symmetric separable states") {
  Rng rng(2);
  const DensityMatrix prod(identical_product(random_locals(Layout(1, 3), rng)[0], 3));
  const auto rep = symmetric_witness_test(prod, config(10));
  CHECK_FALSE(rep.npt);
  CHECK_FALSE(rep.violation_found);
  CHECK(rep.best_margin >= -1e-9);
  CHECK_FALSE(rep.random_trial_beat_optimum);
  CHECK_THROWS_AS(symmetric_witness_test(DensityMatrix(random_product(Layout(2, 2), rng))), InputError);
}

TEST_CASE("classification table") {
  const auto ok = make_report("x", {}, 1.0, 0.0, 1e-7);
  const auto bad = make_report("x", {}, 0.0, 1.0, 1e-7);
  auto inapplicable = bad;
  inapplicable.status = ReportStatus::inapplicable;
  CHECK(classify({ok}, {0.1}) == Classification::separable_consistent);
  CHECK(classify({bad}, {0.1}) == Classification::bound_entanglement_candidate);
  CHECK(classify({bad}, {-0.1}) == Classification::npt_entangled);
  CHECK(classify({ok}, {-0.1}) == Classification::undetected);
  CHECK(classify({inapplicable}, {0.1}) == Classification::separable_consistent);
  CHECK(std::string(classification_name(Classification::undetected)) == "undetected");
}

TEST_CASE("linear grids") {
  const auto g = linear_grid(0.0, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g[1] == 0.25);
  CHECK(g.back() == 1.0);
  CHECK(linear_grid(0.3, 0.9, 1) == std::vector<double>{0.3});
  CHECK_THROWS_AS(linear_grid(0.0, 1.0, 0), InputError);
}

TEST_CASE("noise scan of the three-qutrit singlet crosses at three quarters") {
  const auto rows = noise_scan(sud_singlet(3, 3), linear_grid(0.0, 1.0, 101), {sud_singlet_criterion(3)});
  REQUIRE(rows.size() == 101);
  for (const auto& row : rows) {
    const double m = row.reports[0].margin;
    if (row.param < 0.75 - 1e-9) CHECK(m < 0.0);
    if (row.param > 0.75 + 1e-9) CHECK(m > 0.0);
  }
  CHECK_THAT(rows[75].reports[0].margin, WithinAbs(0.0, 1e-8));
  CHECK(rows[0].classification == Classification::npt_entangled);
  CHECK(rows[100].classification == Classification::separable_consistent);
  CHECK(rows[0].cuts.size() == 3);
  CHECK_THROWS_AS(noise_scan(sud_singlet(2, 2), {1.5}, {sud_singlet_criterion(2)}), InputError);
}

TEST_CASE("thermal scan") {
  const Layout l(3, 3);
  const auto h = build_hamiltonian(parse_hamiltonian("sum-Gk2"), l);
  const auto rows = thermal_scan(h, l, {0.01, 1e9}, {sud_singlet_criterion(3)});
  CHECK_THAT(rows[0].reports[0].margin, WithinAbs(-12.0, 1e-6));
  CHECK(rows[1].reports[0].margin > 0.0);
  CHECK_THROWS_AS(thermal_scan(h, l, {2.0, 1.0}, {sud_singlet_criterion(3)}), InputError);
  CHECK_THROWS_AS(thermal_scan(h, l, {0.0}, {sud_singlet_criterion(3)}), InputError);
  CHECK_THROWS_AS(parse_hamiltonian("ising"), InputError);
}

TEST_CASE("optimizer is deterministic per seed and validates its configuration") {
  const auto c = standard_ssi_criterion(Spin(2));
  const Layout l(2, 3);
  const auto a = minimize_over_products(c, l, config(4, 11));
  const auto b = minimize_over_products(c, l, config(4, 11));
  CHECK(a.min_margin == b.min_margin);
  CHECK(a.best_restart == b.best_restart);
  REQUIRE(a.argmin.has_value());
  CHECK((a.argmin->assemble().amplitudes() - b.argmin->assemble().amplitudes()).norm() == 0.0);
  CHECK_THROWS_AS(minimize_over_products(c, l, config(0)), InputError);
  CHECK_THROWS_AS(minimize_over_products(c, Layout(2, 2), config(1)), InputError);
}
