#include "csdual/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace csdual {

namespace {

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw InputError(std::string(what) + ": expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw InputError(std::string(what) + ": unknown key \"" + key + "\"");
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + ": expected a number");
  return j.get<double>();
}

std::vector<std::pair<double, double>> pairs(const Json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + ": expected an array of pairs");
  std::vector<std::pair<double, double>> out;
  for (const Json& e : j) {
    if (!e.is_array() || e.size() != 2) throw InputError(std::string(what) + ": every entry must be a pair");
    out.emplace_back(number(e[0], what), number(e[1], what));
  }
  return out;
}

const char* kind_name(PatternKind k) { return k == PatternKind::IdenticallyZero ? "IdenticallyZero" : "Mixed"; }

}  // namespace

Json load_json_arg(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    try {
      return Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw InputError(arg + ": " + e.what());
    }
  }
  try {
    return Json::parse(arg);
  } catch (const Json::parse_error&) {
    throw InputError("not a readable file or inline JSON: " + arg);
  }
}

MixedModel model_from_json(const Json& j) {
  reject_unknown(j, {"terms", "h"}, "model");
  if (!j.contains("terms")) throw InputError("model: missing \"terms\"");
  std::vector<Term> terms;
  for (const auto& [p, c] : pairs(j.at("terms"), "model.terms")) {
    if (p != std::floor(p)) throw InputError("model.terms: degree must be an integer");
    terms.push_back({static_cast<int>(p), c});
  }
  const double h = j.contains("h") ? number(j.at("h"), "model.h") : 0.0;
  try {
    return MixedModel(std::move(terms), h);
  } catch (const ModelError& e) {
    throw InputError(std::string("model: ") + e.what());
  }
}

Json to_json(const MixedModel& model) {
  Json terms = Json::array();
  for (const Term& t : model.terms()) terms.push_back({t.degree, t.coeff});
  return {{"terms", terms}, {"h", model.field()}};
}

ParisiMeasure measure_from_json(const Json& j, const MixedModel& model) {
  if (j.is_object() && j.contains("measure") && !j.contains("atoms")) return measure_from_json(j.at("measure"), model);
  // segment_masses is derived output and ignored on input.
  reject_unknown(j, {"atoms", "segments", "segment_masses"}, "measure");
  std::vector<Atom> atoms;
  std::vector<Segment> segs;
  if (j.contains("atoms"))
    for (const auto& [q, m] : pairs(j.at("atoms"), "measure.atoms")) atoms.push_back({q, m});
  if (j.contains("segments"))
    for (const auto& [a, b] : pairs(j.at("segments"), "measure.segments")) segs.push_back({a, b});
  if (atoms.empty() && segs.empty()) throw InputError("measure: no atoms and no segments");
  try {
    std::optional<MixedModel> link;
    if (!segs.empty()) link = model;
    return ParisiMeasure(std::move(atoms), std::move(segs), std::move(link));
  } catch (const Error& e) {
    throw InputError(std::string("measure: ") + e.what());
  }
}

Json to_json(const ParisiMeasure& mu) {
  Json atoms = Json::array(), segs = Json::array(), seg_mass = Json::array();
  for (const Atom& a : mu.atoms()) atoms.push_back({a.q, a.m});
  for (std::size_t k = 0; k < mu.segments().size(); ++k) {
    segs.push_back({mu.segments()[k].r1, mu.segments()[k].r2});
    seg_mass.push_back(mu.segment_mass(k));
  }
  return {{"atoms", atoms}, {"segments", segs}, {"segment_masses", seg_mass}};
}

Json to_json(const Interval& iv) { return Json::array({iv.lo, iv.hi}); }

Json to_json(const SignPattern& pattern) {
  Json pos = Json::array(), nonpos = Json::array(), roots = Json::array();
  for (const Interval& iv : pattern.positive_components) pos.push_back(to_json(iv));
  for (const Interval& iv : pattern.nonpositive_components) nonpos.push_back(to_json(iv));
  for (const Interval& iv : pattern.roots) roots.push_back(to_json(iv));
  return {{"kind", kind_name(pattern.kind)},
          {"positive", pos},
          {"nonpositive", nonpos},
          {"roots", roots},
          {"root_tol", pattern.root_tol}};
}

Json to_json(const AnsatzFamily& family) {
  Json slots = Json::array();
  for (const Slot& s : family.slots)
    slots.push_back({{"kind", s.kind == Slot::Kind::AtomPair ? "atom_pair" : "segment"}, {"box", to_json(s.box)}});
  return {{"dimension", family.dimension()}, {"location_cap", family.location_cap}, {"slots", slots}};
}

Json to_json(const DualCertificate& cert) {
  Json consistency = Json::array(), coincidence = Json::array();
  for (const ConsistencyEntry& e : cert.consistency)
    consistency.push_back(
        {{"t", e.t}, {"derivative_defect", e.derivative_defect}, {"curvature_defect", e.curvature_defect}});
  for (const CoincidenceComponent& c : cert.coincidence_set)
    coincidence.push_back({{"lo", c.lo},
                           {"hi", c.hi},
                           {"argmin", c.argmin},
                           {"min_gap", c.min_gap},
                           {"curvature", c.curvature},
                           {"interval", c.interval},
                           {"mass", c.mass}});
  const CertifyOptions& t = cert.tolerances;
  return {{"P", cert.P},
          {"D", cert.D},
          {"duality_gap", cert.gap},
          {"within_gap", cert.within_gap()},
          {"complementarity_defect", cert.complementarity_defect},
          {"tail_regularity_defect", cert.tail_regularity_defect},
          {"segment_identity_defect", cert.segment_identity_defect},
          {"shift", cert.shift},
          {"t_min", cert.t_min},
          {"q_star", cert.q_star},
          {"coincidence_set", coincidence},
          {"shallow_points", cert.shallow_points},
          {"consistency", consistency},
          {"tolerances",
           {{"gap_tol", t.gap_tol},
            {"coin_tol", t.coin_tol},
            {"quad_tol", t.quad_tol},
            {"x_tol", t.x_tol},
            {"mass_tol", t.mass_tol},
            {"deriv_tol", t.deriv_tol}}}};
}

Json to_json(const RSDiagnostics& rs) {
  Json roots = Json::array();
  for (const FixedPointRoot& r : rs.roots)
    roots.push_back({{"q", r.q},
                     {"residual", r.residual},
                     {"replicon", r.replicon},
                     {"obstacle_pass", r.obstacle_pass},
                     {"gap", r.gap}});
  return {{"roots", roots}, {"xi2_at_one_le_one", rs.xi2_at_one_le_one}, {"field_dominates", rs.field_dominates}};
}

Json to_json(const SolveOptions& o) {
  return {{"gap_tol", o.gap_tol},   {"quad_tol", o.quad_tol},   {"coin_tol", o.coin_tol},
          {"root_tol", o.root_tol}, {"fp_tol", o.fp_tol},       {"mass_tol", o.mass_tol},
          {"prune_tol", o.prune_tol}, {"merge_tol", o.merge_tol}, {"refine_tol", o.refine_tol},
          {"n_starts", o.n_starts},
          {"seed", o.seed},         {"max_iterations", o.max_iterations}};
}

Json to_json(const SolveReport& r) {
  const Telemetry& t = r.telemetry;
  return {{"status", r.status == SolveStatus::Certified ? "certified" : "uncertified"},
          {"free_energy", r.free_energy},
          {"phase",
           {{"label", r.phase.str()}, {"atoms", r.phase.atoms}, {"segments", r.phase.segments}}},
          {"measure", to_json(r.measure)},
          {"certificate", to_json(r.certificate)},
          {"rs", to_json(r.rs)},
          {"sign_pattern", to_json(r.pattern)},
          {"options", to_json(r.options)},
          {"telemetry",
           {{"iterations", t.iterations},
            {"restarts", t.restarts},
            {"inner_solves", t.inner_solves},
            {"seed", t.seed},
            {"wall_time_s", t.wall_time_s}}}};
}

Json to_json(const OracleResult& o) {
  Json clusters = Json::array();
  for (const OracleCluster& c : o.clusters)
    clusters.push_back({{"lo", c.lo}, {"hi", c.hi}, {"center", c.center}, {"mass", c.mass}});
  return {{"N", o.weights.size()},
          {"D_lower", o.D_lower},
          {"P_upper", o.P_upper},
          {"bracket_width", o.P_upper - o.D_lower},
          {"iterations", o.iterations},
          {"fw_gap", o.fw_gap},
          {"clusters", clusters}};
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "beta,h,F,gap,phase,n_atoms,n_segments,status\n";
  out << std::setprecision(17);
  for (const SweepRow& r : rows) {
    out << r.beta << ',' << r.h << ',';
    if (r.status == "error") {
      out << "nan,nan,,0,0,error\n";
      continue;
    }
    out << r.F << ',' << r.gap << ',' << r.phase << ',' << r.n_atoms << ',' << r.n_segments << ',' << r.status
        << '\n';
  }
  return out.str();
}

}  // namespace csdual
