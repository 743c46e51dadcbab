#include <doctest.h>

#include <cmath>

#include "csdual/error.hpp"
#include "csdual/solver.hpp"

using namespace csdual;

namespace {

double total_mass(const ParisiMeasure& mu) { return mu.total_mass(); }

}  // namespace

TEST_CASE("weak pure 2-spin: delta_0 with the closed-form free energy") {
  const SolveReport r = solve(MixedModel({{2, 0.25}}, 0.0));
  CHECK(r.status == SolveStatus::Certified);
  CHECK(r.free_energy == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(std::abs(r.certificate.gap) <= 1e-10);
  CHECK(r.phase.kind == PhaseLabel::Kind::RS);
  REQUIRE(r.measure.atoms().size() == 1);
  CHECK(r.measure.atoms()[0].q == 0.0);
}

TEST_CASE("pure 2-spin below the replicon bound stays at q = 0") {
  for (double c : {0.05, 0.2, 0.35, 0.5}) {
    const SolveReport r = solve(MixedModel({{2, c}}, 0.0));
    CHECK(r.status == SolveStatus::Certified);
    CHECK(r.free_energy == doctest::Approx(c / 2).epsilon(1e-12));
    CHECK(r.phase.str() == "RS");
    CHECK(std::abs(r.measure.atoms()[0].q) <= 1e-8);
  }
}

TEST_CASE("pure 2-spin above the bound: delta_q with q = 1 - 1/sqrt(2c)") {
  const double c = 2.0;
  const SolveReport r = solve(MixedModel({{2, c}}, 0.0));
  CHECK(r.status == SolveStatus::Certified);
  REQUIRE(r.phase.atoms == 1);
  const double q = 1.0 - 1.0 / std::sqrt(2 * c);
  CHECK(r.measure.atoms()[0].q == doctest::Approx(q).epsilon(1e-10));
  CHECK(r.free_energy == doctest::Approx(primal_dirac(MixedModel({{2, c}}, 0.0), q)).epsilon(1e-13));
}

TEST_CASE("pure 3-spin: at most two atoms, matches the grid oracle") {
  const MixedModel m({{3, 2.0}}, 0.0);
  const SolveReport r = solve(m);
  CHECK(r.status == SolveStatus::Certified);
  CHECK(r.certificate.gap <= 1e-8);
  CHECK(r.phase.atoms <= 2);
  CHECK(r.phase.segments == 0);
  const OracleResult o = grid_oracle(m, 2000);
  CHECK(std::abs(r.free_energy - o.P_upper) <= 5e-4);
  CHECK(o.D_lower <= r.free_energy);
  CHECK(o.clusters.size() <= 2);
  CHECK(varineq_residual(m, r.measure, 512) >= -10 * r.options.gap_tol);
}

TEST_CASE("zero budget reports an uncertified best effort") {
  SolveOptions opt;
  opt.max_iterations = 0;
  const SolveReport r = solve(MixedModel({{3, 2.0}}, 0.0), opt);
  CHECK(r.status == SolveStatus::Uncertified);
  CHECK(r.certificate.gap > opt.gap_tol);
  CHECK(r.measure.atoms().size() == 1);
  CHECK(r.telemetry.iterations == 0);
}

TEST_CASE("fRSB for {(2,1),(4,1)} scaled up: segment obeys phi sqrt(xi'') = 1") {
  const MixedModel m = MixedModel({{2, 1.0}, {4, 1.0}}, 0.0).scaled(2.0);
  const SolveReport r = solve(m);
  CHECK(r.status == SolveStatus::Certified);
  REQUIRE(r.phase.segments == 1);
  CHECK(r.certificate.segment_identity_defect <= 1e-6);
  const Segment& s = r.measure.segments()[0];
  for (int i = 0; i <= 50; ++i) {
    const double t = s.r1 + (s.r2 - s.r1) * i / 50.0;
    CHECK(std::abs(r.measure.phi(t) * std::sqrt(m.xi(t, 2)) - 1.0) <= 1e-6);
  }
  // Segment sits in the nonpositive component, at most two atoms above it.
  const SignPattern& pat = r.pattern;
  REQUIRE(pat.nonpositive_components.size() == 1);
  CHECK(s.r2 <= pat.nonpositive_components[0].hi);
  int above = 0;
  for (const Atom& a : r.measure.atoms())
    if (a.q > pat.nonpositive_components[0].hi) ++above;
  CHECK(above <= 2);
}

TEST_CASE("solve is deterministic for a fixed seed") {
  const MixedModel m({{2, 1.0}, {4, 1.0}}, 0.3);
  SolveOptions opt;
  opt.seed = 42;
  const SolveReport a = solve(m, opt);
  const SolveReport b = solve(m, opt);
  CHECK(a.free_energy == b.free_energy);
  CHECK(a.certificate.gap == b.certificate.gap);
  CHECK(a.telemetry.iterations == b.telemetry.iterations);
  REQUIRE(a.measure.atoms().size() == b.measure.atoms().size());
  for (std::size_t i = 0; i < a.measure.atoms().size(); ++i) {
    CHECK(a.measure.atoms()[i].q == b.measure.atoms()[i].q);
    CHECK(a.measure.atoms()[i].m == b.measure.atoms()[i].m);
  }
}

TEST_CASE("rs_quick_tests") {
  SUBCASE("weak 2-spin") {
    const RSDiagnostics d = rs_quick_tests(MixedModel({{2, 0.25}}, 0.0));
    REQUIRE(d.roots.size() == 1);
    CHECK(d.roots[0].q == 0.0);
    CHECK(d.roots[0].replicon == doctest::Approx(0.5));
    CHECK(d.xi2_at_one_le_one);
    CHECK(d.roots[0].obstacle_pass);
  }
  SUBCASE("field dominates") {
    const MixedModel m({{2, 1.0}}, 2.0);
    const RSDiagnostics d = rs_quick_tests(m);
    CHECK(d.field_dominates);
    CHECK(!d.xi2_at_one_le_one);
    REQUIRE(d.roots.size() == 1);
    const double q = d.roots[0].q;
    CHECK(std::abs(q - (2 * q + 4) * (1 - q) * (1 - q)) <= 1e-12);
    CHECK(d.roots[0].obstacle_pass);
    CHECK(solve(m).phase.kind == PhaseLabel::Kind::RS);
  }
  SUBCASE("q = 0 is a root whenever h = 0") {
    for (const auto& terms : {std::vector<Term>{{3, 2.0}}, std::vector<Term>{{2, 3.0}, {5, 1.0}}}) {
      const RSDiagnostics d = rs_quick_tests(MixedModel(terms, 0.0));
      REQUIRE(!d.roots.empty());
      CHECK(d.roots[0].q == 0.0);
      for (const FixedPointRoot& r : d.roots) CHECK(std::abs(r.residual) <= 1e-12);
    }
  }
  SUBCASE("strong 2-spin has a replicon-unstable q = 0 and a stable nonzero root") {
    const RSDiagnostics d = rs_quick_tests(MixedModel({{2, 2.0}}, 0.0));
    REQUIRE(d.roots.size() == 2);
    CHECK(d.roots[0].replicon < 0.0);
    CHECK(!d.roots[0].obstacle_pass);
    CHECK(d.roots[1].q == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.roots[1].obstacle_pass);
  }
}

TEST_CASE("classify") {
  CHECK(classify(ParisiMeasure::dirac(0.0)).str() == "RS");
  const PhaseLabel two = classify(ParisiMeasure({{0.1, 0.5}, {0.6, 0.5}}));
  CHECK(two.kind == PhaseLabel::Kind::kRSB);
  CHECK(two.k == 1);
  CHECK(two.str() == "1RSB");
  const MixedModel m({{2, 1.0}, {4, 1.0}}, 0.0);
  const double seg = m.g_prime(0.0) - m.g_prime(0.2);
  const PhaseLabel f = classify(ParisiMeasure({{0.5, 1.0 - seg}}, {{0.0, 0.2}}, m));
  CHECK(f.kind == PhaseLabel::Kind::fRSB);
  CHECK(f.atoms == 1);
  CHECK(f.segments == 1);
  // Negligible atoms do not count.
  CHECK(classify(ParisiMeasure({{0.1, 1.0 - 1e-12}, {0.6, 1e-12}})).str() == "RS");
}

TEST_CASE("prune_and_merge preserves mass") {
  const ParisiMeasure mu({{0.1, 0.4}, {0.1 + 5e-8, 0.2}, {0.5, 1e-11}, {0.7, 0.4 - 1e-11}});
  const ParisiMeasure p = prune_and_merge(mu, 1e-9, 1e-7);
  CHECK(total_mass(p) == doctest::Approx(1.0).epsilon(1e-15));
  REQUIRE(p.atoms().size() == 2);
  CHECK(p.atoms()[0].m == doctest::Approx(0.6));
  CHECK(p.atoms()[0].q == doctest::Approx(0.1 + 5e-8 / 3).epsilon(1e-14));
  CHECK(p.atoms()[1].m == doctest::Approx(0.4));

  const MixedModel m({{2, 1.0}, {4, 1.0}}, 0.0);
  const double seg = m.g_prime(0.0) - m.g_prime(0.2);
  const ParisiMeasure ms({{0.2 + 1e-8, 0.3}, {0.6, 0.7 - seg}}, {{0.0, 0.2}}, m);
  const ParisiMeasure ps = prune_and_merge(ms, 1e-9, 1e-7);
  CHECK(ps.atoms()[0].q == 0.2);
  CHECK(total_mass(ps) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sweep") {
  const MixedModel tmpl({{2, 1.0}}, 0.0);
  SUBCASE("1x1 sweep reproduces solve") {
    const auto rows = sweep(tmpl, {0.9}, {0.3}, SolveOptions{}, 1);
    REQUIRE(rows.size() == 1);
    const SolveReport r = solve(tmpl.scaled(0.81).with_field(0.3));
    CHECK(rows[0].F == r.free_energy);
    CHECK(rows[0].phase == r.phase.str());
    CHECK(rows[0].status == "certified");
  }
  SUBCASE("RS while 2 beta^2 <= 1") {
    const auto rows = sweep(tmpl, {0.1, 0.25, 0.4, 0.55, 0.7}, {0.0}, SolveOptions{}, 2);
    REQUIRE(rows.size() == 5);
    double prev = -1.0;
    for (const SweepRow& r : rows) {
      CHECK(r.phase == "RS");
      CHECK(r.F == doctest::Approx(r.beta * r.beta / 2).epsilon(1e-12));
      CHECK(r.F >= prev);
      prev = r.F;
    }
  }
  SUBCASE("row order does not depend on the worker count") {
    const std::vector<double> betas = {0.5, 1.0, 1.5}, hs = {0.0, 0.5};
    const auto a = sweep(tmpl, betas, hs, SolveOptions{}, 1);
    const auto b = sweep(tmpl, betas, hs, SolveOptions{}, 3);
    REQUIRE(a.size() == 6);
    REQUIRE(b.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].beta == b[i].beta);
      CHECK(a[i].h == b[i].h);
      CHECK(a[i].F == b[i].F);
    }
    CHECK(a[1].beta == 0.5);
    CHECK(a[1].h == 0.5);
  }
  SUBCASE("failing cells are recorded") {
    const auto rows = sweep(tmpl, {0.0, 0.5}, {0.0}, SolveOptions{}, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status == "error");
    CHECK(!rows[0].error.empty());
    CHECK(rows[1].status == "certified");
  }
}

TEST_CASE("grid oracle") {
  SUBCASE("closed-form target inside the bracket") {
    const OracleResult o = grid_oracle(MixedModel({{2, 0.25}}, 0.0), 1000);
    CHECK(o.P_upper >= 0.125 - 1e-6);
    CHECK(o.P_upper <= 0.125 + 1e-4);
    CHECK(o.D_lower <= 0.125 + 1e-12);
  }
  SUBCASE("refinement narrows the bracket") {
    const MixedModel m({{3, 2.0}}, 0.0);
    const OracleResult coarse = grid_oracle(m, 100);
    const OracleResult fine = grid_oracle(m, 1000);
    CHECK(fine.P_upper - fine.D_lower < coarse.P_upper - coarse.D_lower);
    CHECK(fine.P_upper <= coarse.P_upper + 1e-12);
  }
  SUBCASE("weights form a probability vector on i/N") {
    const OracleResult o = grid_oracle(MixedModel({{2, 1.0}, {4, 1.0}}, 0.3), 200);
    double s = 0.0;
    for (double w : o.weights.weights()) {
      CHECK(w >= 0.0);
      s += w;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(o.weights.support_sup() < 1.0);
    CHECK(o.fw_gap <= 1e-10);
  }
  CHECK_THROWS_AS(grid_oracle(MixedModel({{2, 1.0}}, 0.0), 1), ModelError);
}
