#include <doctest.h>

#include <sstream>
#include <string>

#include "csdual/io.hpp"

using namespace csdual;

TEST_CASE("model JSON") {
  const MixedModel m = model_from_json(Json::parse(R"({"terms": [[2, 1.0], [4, 0.5]], "h": 0.3})"));
  REQUIRE(m.terms().size() == 2);
  CHECK(m.terms()[1].degree == 4);
  CHECK(m.terms()[1].coeff == 0.5);
  CHECK(m.field() == 0.3);
  CHECK(model_from_json(Json::parse(R"({"terms": [[3, 2]]})")).field() == 0.0);

  const MixedModel back = model_from_json(to_json(m));
  CHECK(back.terms()[0].coeff == m.terms()[0].coeff);
  CHECK(back.field() == m.field());

  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"terms": [[2, 1]], "beta": 2})")), InputError);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"h": 1})")), InputError);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"terms": [[2.5, 1]]})")), InputError);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"terms": [[2, "x"]]})")), InputError);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"({"terms": [[1, 1]]})")), InputError);
  CHECK_THROWS_AS(model_from_json(Json::parse(R"([2, 1])")), InputError);
}

TEST_CASE("measure JSON") {
  const MixedModel m({{2, 1.0}, {4, 1.0}}, 0.0);
  const ParisiMeasure mu = measure_from_json(Json::parse(R"({"atoms": [[0.2, 0.5], [0.6, 0.5]]})"), m);
  CHECK(mu.atoms().size() == 2);
  CHECK(mu.segments().empty());
  CHECK_THROWS_AS(measure_from_json(Json::parse(R"({"atoms": [[0.2, 0.5]], "extra": 1})"), m), InputError);
  CHECK_THROWS_AS(measure_from_json(Json::parse(R"({})"), m), InputError);
  CHECK_THROWS_AS(measure_from_json(Json::parse(R"({"atoms": [[0.2]]})"), m), InputError);

  const double seg = m.g_prime(0.0) - m.g_prime(0.2);
  const ParisiMeasure withseg({{0.5, 1.0 - seg}}, {{0.0, 0.2}}, m);
  const ParisiMeasure back = measure_from_json(to_json(withseg), m);
  CHECK(back.segment_mass(0) == withseg.segment_mass(0));
  CHECK(back.phi(0.1) == withseg.phi(0.1));
}

TEST_CASE("a solve report certifies to the same gap") {
  const MixedModel m({{3, 2.0}}, 0.5);
  const SolveReport r = solve(m);
  const Json j = Json::parse(to_json(r).dump());
  const ParisiMeasure mu = measure_from_json(j, m);
  CertifyOptions o;
  const DualCertificate c = certify(m, mu, o);
  CHECK(std::abs(c.gap - r.certificate.gap) <= 1e-10);
  CHECK(j.at("status") == "certified");
  CHECK(j.at("options").at("gap_tol") == 1e-8);
  CHECK(j.at("certificate").contains("tolerances"));
}

TEST_CASE("sweep CSV has one row per cell") {
  std::vector<SweepRow> rows(3);
  rows[0] = {0.5, 0.0, 0.125, 0.0, "RS", 1, 0, "certified", ""};
  rows[1] = {1.0, 0.0, 0.6, 1e-9, "1RSB", 2, 0, "certified", ""};
  rows[2] = {0.0, 0.0, 0.0, 0.0, "", 0, 0, "error", "boom"};
  std::istringstream in(sweep_csv(rows));
  std::string line;
  std::getline(in, line);
  CHECK(line == "beta,h,F,gap,phase,n_atoms,n_segments,status");
  int n = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++n;
    last = line;
  }
  CHECK(n == 3);
  CHECK(last.substr(last.size() - 6) == ",error");
}
