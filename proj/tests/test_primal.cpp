#include <doctest.h>

#include <cmath>
#include <random>

#include "csdual/error.hpp"
#include "csdual/primal.hpp"

using namespace csdual;

namespace {

ParisiMeasure random_atoms(std::mt19937_64& rng, int max_atoms, double qmax) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = 1 + static_cast<int>(max_atoms * unit(rng)) % max_atoms;
  std::vector<Atom> atoms;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    atoms.push_back({qmax * unit(rng), unit(rng) + 0.05});
    total += atoms.back().m;
  }
  for (Atom& a : atoms) a.m /= total;
  return ParisiMeasure(atoms);
}

}  // namespace

TEST_CASE("closed-form values") {
  const MixedModel m({{2, 0.25}}, 0.0);
  CHECK(primal_value(m, ParisiMeasure::dirac(0.0)) == doctest::Approx(0.125).epsilon(1e-14));
  const MixedModel sk({{2, 1.0}}, 0.0);
  CHECK(primal_value(sk, ParisiMeasure::dirac(0.5)) == doctest::Approx(0.52842640972002735).epsilon(1e-12));
  CHECK(primal_dirac(sk, 0.5) == doctest::Approx(0.52842640972002735).epsilon(1e-14));
  const MixedModel m3({{3, 1.0}}, 0.3);
  CHECK(primal_value(m3, ParisiMeasure({{0.0, 0.5}, {0.4, 0.5}})) ==
        doctest::Approx(0.55226926056878559).epsilon(1e-12));
  const MixedModel mh({{2, 0.7}, {5, 0.2}}, 0.8);
  CHECK(primal_value(mh, ParisiMeasure::dirac(0.0)) == doctest::Approx(0.5 * (0.9 + 0.64)).epsilon(1e-14));
}

TEST_CASE("P(delta_q) closed form agrees with quadrature") {
  const std::vector<MixedModel> models{MixedModel({{2, 1.0}}, 0.0), MixedModel({{3, 2.0}}, 0.5),
                                       MixedModel({{2, 1.0}, {4, 1.0}}, 1.0), MixedModel({{4, 3.0}, {6, 0.5}}, 0.2)};
  for (const MixedModel& m : models)
    for (int i = 1; i <= 9; ++i) {
      const double q = i / 10.0;
      CHECK(std::abs(primal_value(m, ParisiMeasure::dirac(q)) - primal_dirac(m, q)) <= 1e-10);
    }
}

TEST_CASE("primal rejects measures outside Q or with wrong mass") {
  const MixedModel m({{2, 1.0}}, 0.0);
  CHECK_THROWS_AS(primal_value(m, ParisiMeasure({{0.3, 0.9}})), InvalidMeasureError);
  CHECK_THROWS_AS(primal_value(m, ParisiMeasure({{1.0, 1.0}})), InvalidMeasureError);
}

TEST_CASE("mass_gradient matches finite differences of P") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<MixedModel> models{MixedModel({{2, 1.0}}, 0.5), MixedModel({{3, 2.0}}, 0.0),
                                       MixedModel({{2, 0.5}, {4, 2.0}}, 0.3)};
  for (int trial = 0; trial < 30; ++trial) {
    const MixedModel& m = models[trial % models.size()];
    const ParisiMeasure mu = random_atoms(rng, 3, 0.9);
    const auto atoms = mu.atoms();
    // Transfer mass from atom k to a new point q.
    const std::size_t k = static_cast<std::size_t>(unit(rng) * atoms.size()) % atoms.size();
    const double q = 0.95 * unit(rng);
    const double h = 1e-5 * atoms[k].m;
    auto shifted = [&](double e) {
      std::vector<Atom> a = atoms;
      a[k].m -= e;
      a.push_back({q, e});
      return primal_value(m, ParisiMeasure(a));
    };
    // The new atom would get negative mass for e < 0; use the one-sided
    // second-order stencil.
    const double fd = (-3.0 * shifted(0.0) + 4.0 * shifted(h) - shifted(2.0 * h)) / (2.0 * h);
    const double an = mass_gradient(m, mu, q) - mass_gradient(m, mu, atoms[k].q);
    CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)) + 1e-9);
  }
}

TEST_CASE("mass_gradient integrates to zero against mu") {
  std::mt19937_64 rng(1);
  const MixedModel m({{2, 1.0}, {3, 0.5}}, 0.4);
  for (int trial = 0; trial < 10; ++trial) {
    const ParisiMeasure mu = random_atoms(rng, 4, 0.9);
    const double mean = mu.expect([&](double q) { return mass_gradient(m, mu, q); });
    CHECK(std::abs(mean) <= 1e-10);
  }
}

TEST_CASE("varineq_residual") {
  const MixedModel easy({{2, 0.25}}, 0.0);
  CHECK(varineq_residual(easy, ParisiMeasure::dirac(0.0), 200) >= -1e-8);
  CHECK(varineq_residual(easy, ParisiMeasure::dirac(0.9), 200) < -1e-3);
  const MixedModel hard({{2, 1.0}}, 0.0);
  CHECK(varineq_residual(hard, ParisiMeasure::dirac(0.0), 200) < -1e-3);
}

TEST_CASE("strict convexity along segments between measures") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const MixedModel m({{2, 0.8}, {4, 1.5}}, 0.2);
  for (int trial = 0; trial < 30; ++trial) {
    const ParisiMeasure a = random_atoms(rng, 3, 0.9);
    const ParisiMeasure b = random_atoms(rng, 3, 0.9);
    const double lam = 0.2 + 0.6 * unit(rng);
    std::vector<Atom> mix;
    for (Atom x : a.atoms()) mix.push_back({x.q, lam * x.m});
    for (Atom x : b.atoms()) mix.push_back({x.q, (1 - lam) * x.m});
    const double lhs = primal_value(m, ParisiMeasure(mix));
    const double rhs = lam * primal_value(m, a) + (1 - lam) * primal_value(m, b);
    CHECK(lhs < rhs - 1e-12);
  }
}

TEST_CASE("truncation lowers P for Lebesgue on the grid") {
  const int n = 1000;
  const GridMeasure leb(std::vector<double>(n, 1.0 / n));
  for (const MixedModel& m : {MixedModel({{2, 0.25}}, 0.0), MixedModel({{3, 1.0}}, 1.0)}) {
    const double base = primal_value(m, leb);
    for (double eps : {0.05, 0.1}) CHECK(primal_value(m, truncate(leb, eps)) < base - 1e-6);
  }
}
