#include <doctest.h>

#include <cmath>
#include <random>

#include "csdual/error.hpp"
#include "csdual/measure.hpp"

using namespace csdual;

namespace {

const MixedModel kM24({{2, 1.0}, {4, 1.0}}, 0.0);

// Random valid measure for the {(2,1),(4,1)} model: up to three atoms and
// optionally one segment inside [0, 12^{-1/2}].
ParisiMeasure random_measure(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Segment> segs;
  double seg_mass = 0.0;
  if (unit(rng) < 0.5) {
    double a = 0.28 * unit(rng), b = 0.28 * unit(rng);
    if (a > b) std::swap(a, b);
    segs.push_back({a, b});
    seg_mass = kM24.g_prime(a) - kM24.g_prime(b);
  }
  const int n = 1 + static_cast<int>(3 * unit(rng));
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) total += (x = unit(rng) + 1e-3);
  std::vector<Atom> atoms;
  for (int i = 0; i < n; ++i) atoms.push_back({0.97 * unit(rng), w[i] / total * (1.0 - seg_mass)});
  if (segs.empty()) return ParisiMeasure(atoms);
  return ParisiMeasure(atoms, segs, kM24);
}

}  // namespace

TEST_CASE("cdf and phi of atoms") {
  const ParisiMeasure d0 = ParisiMeasure::dirac(0.0);
  CHECK(d0.cdf(0.5) == 1.0);
  CHECK(d0.phi(0.3) == doctest::Approx(0.7).epsilon(1e-15));
  const ParisiMeasure two({{0.6, 0.7}, {0.2, 0.3}});
  CHECK(two.atoms().front().q == 0.2);
  CHECK(two.cdf(0.4) == doctest::Approx(0.3));
  CHECK(two.cdf(0.6) == doctest::Approx(1.0));
  const ParisiMeasure dq = ParisiMeasure::dirac(0.4);
  CHECK(dq.phi(0.1) == doctest::Approx(0.6));
  CHECK(dq.phi(0.8) == doctest::Approx(0.2));
  const ParisiMeasure half({{0.0, 0.5}, {0.4, 0.5}});
  CHECK(half.phi(0.2) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("segment cdf in closed form") {
  const double seg_mass = kM24.g_prime(0.1) - kM24.g_prime(0.2);
  CHECK(seg_mass == doctest::Approx(0.22576043048698145).epsilon(1e-13));
  const ParisiMeasure mu({{0.05, 0.4}, {0.5, 0.6 - seg_mass}}, {{0.1, 0.2}}, kM24);
  CHECK(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mu.cdf(0.15) == doctest::Approx(0.4 + 0.13754411023280453).epsilon(1e-13));
  CHECK(mu.cdf(0.2) == doctest::Approx(0.4 + seg_mass).epsilon(1e-14));
  // Segment mass equals the quadrature of -frak_d.
  const double br[2] = {0.05, 0.25};
  const double q = quad::integrate([](double t) { return -frak_d(kM24, t); }, br);
  CHECK(std::abs(q - 0.45039591697093181) <= 1e-12);
  CHECK(std::abs(kM24.g_prime(0.05) - kM24.g_prime(0.25) - 0.45039591697093181) <= 1e-12);
}

TEST_CASE("support_sup") {
  CHECK(ParisiMeasure::dirac(0.0).support_sup() == 0.0);
  CHECK(ParisiMeasure({{0.2, 0.3}, {0.6, 0.7}}).support_sup() == 0.6);
  const double sm = kM24.g_prime(0.2) - kM24.g_prime(0.25);
  const ParisiMeasure mu({{0.1, 1.0 - sm}}, {{0.2, 0.25}}, kM24);
  CHECK(mu.support_sup() == 0.25);
  CHECK(ParisiMeasure({{0.2, 1.0}, {0.9, 0.0}}).support_sup() == 0.2);
}

TEST_CASE("measure construction rejects bad input") {
  CHECK_THROWS_AS(ParisiMeasure({{1.2, 1.0}}), InvalidMeasureError);
  CHECK_THROWS_AS(ParisiMeasure({{0.1, 1.0}}, {{0.1, 0.2}}), InvalidMeasureError);
  CHECK_THROWS_AS(ParisiMeasure({{0.1, 1.0}}, {{0.2, 0.1}}, kM24), InvalidMeasureError);
  CHECK_THROWS_AS(require_probability(ParisiMeasure({{0.1, 0.9}})), InvalidMeasureError);
  CHECK_THROWS_AS(require_probability(ParisiMeasure({{1.0, 1.0}})), InvalidMeasureError);
}

TEST_CASE("phi properties on random measures") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const ParisiMeasure mu = random_measure(rng);
    REQUIRE(mu.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    const double qs = mu.support_sup();
    const double phi0 = mu.phi(0.0);
    CHECK(phi0 > 0.0);
    CHECK(phi0 <= 1.0);
    double prev_cdf = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = i / 1000.0;
      const double p = mu.phi(t);
      CHECK(p <= 1.0 - t + 1e-15);
      if (t >= qs) CHECK(p == 1.0 - t);
      const double c = mu.cdf(t);
      CHECK(c >= prev_cdf - 1e-15);
      prev_cdf = c;
    }
    CHECK(mu.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-10));
    // phi against adaptive integration of the cdf.
    for (double t : {0.0, 0.1, 0.33, 0.5, 0.8}) {
      auto pts = mu.breakpoints();
      const auto br = quad::clean_breaks(pts, t, 1.0);
      const double num = quad::integrate([&](double s) { return mu.cdf(s); }, br);
      CHECK(std::abs(num - mu.phi(t)) <= 1e-10);
    }
  }
}

TEST_CASE("grid measure") {
  const int n = 1000;
  std::vector<double> w(n, 1.0 / n);
  const GridMeasure leb(w);
  CHECK(leb.total_mass() == doctest::Approx(1.0));
  CHECK(leb.support_sup() == doctest::Approx(0.999));
  // phi(t) = int_t^1 cdf(s) ds with a step cdf
  for (double t : {0.0, 0.25, 0.5123, 0.9, 0.9995}) {
    std::vector<double> br{t};
    for (int i = 0; i < n; ++i)
      if (leb.node(i) > t) br.push_back(leb.node(i));
    br.push_back(1.0);
    const double num = quad::integrate([&](double s) { return leb.cdf(s); }, br);
    CHECK(std::abs(num - leb.phi(t)) <= 1e-12);
  }
  CHECK(leb.cdf(0.0) == doctest::Approx(1.0 / n));
  CHECK(leb.cdf(-0.1) == 0.0);
}

TEST_CASE("truncate") {
  const ParisiMeasure d0 = truncate(ParisiMeasure::dirac(0.0), 0.3);
  REQUIRE(d0.atoms().size() == 1);
  CHECK(d0.atoms()[0].q == 0.0);
  const ParisiMeasure d99 = truncate(ParisiMeasure::dirac(0.99), 0.05);
  REQUIRE(d99.atoms().size() == 1);
  CHECK(d99.atoms()[0].q == doctest::Approx(0.95));
  CHECK(d99.atoms()[0].m == 1.0);

  const int n = 1000;
  const GridMeasure leb(std::vector<double>(n, 1.0 / n));
  const ParisiMeasure lt = truncate(leb, 0.1);
  CHECK(lt.support_sup() == doctest::Approx(0.9));
  CHECK(lt.atoms().back().q == doctest::Approx(0.9));
  CHECK(lt.atoms().back().m == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(lt.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

  // Segment cut at 1 - eps keeps the lower part and moves the rest.
  const double sm = kM24.g_prime(0.1) - kM24.g_prime(0.25);
  const ParisiMeasure seg({{0.0, 1.0 - sm}}, {{0.1, 0.25}}, kM24);
  const ParisiMeasure st = truncate(seg, 0.8);
  CHECK(st.support_sup() == doctest::Approx(0.2));
  CHECK(st.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
  for (double t : {0.0, 0.05, 0.15, 0.199}) CHECK(st.cdf(t) == doctest::Approx(seg.cdf(t)).epsilon(1e-14));

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const ParisiMeasure mu = random_measure(rng);
    for (double eps : {0.01, 0.05, 0.3}) {
      const ParisiMeasure tr = truncate(mu, eps);
      CHECK(tr.support_sup() <= 1.0 - eps + 1e-15);
      CHECK_NOTHROW(require_probability(tr));
      if (mu.support_sup() < 1.0 - eps)
        for (double t : {0.0, 0.2, 0.5, 0.9}) CHECK(tr.phi(t) == doctest::Approx(mu.phi(t)).epsilon(1e-14));
    }
  }
}

TEST_CASE("validate") {
  const SignPattern pat = sign_pattern(kM24);
  CHECK(validate(ParisiMeasure::dirac(0.0), pat).ok(1e-10));

  const double sm = kM24.g_prime(0.5) - kM24.g_prime(0.6);
  const ParisiMeasure bad({{0.1, 1.0 - sm}}, {{0.5, 0.6}}, kM24);
  const MeasureDiagnostics d = validate(bad, pat);
  CHECK(!d.segment_sign_violations.empty());
  CHECK(!d.ok(1e-10));

  const MeasureDiagnostics light = validate(ParisiMeasure({{0.1, 0.5}, {0.3, 0.4}}), pat);
  CHECK(light.mass_residual == doctest::Approx(-0.1));
  CHECK(!light.ok(1e-10));

  const MeasureDiagnostics neg = validate(ParisiMeasure({{0.1, 1.2}, {0.3, -0.2}}), pat);
  CHECK(!neg.negative_masses.empty());
}
