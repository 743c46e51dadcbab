#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <utility>
#include <vector>

#include "csdual/dual.hpp"
#include "csdual/io.hpp"
#include "csdual/measure.hpp"
#include "csdual/model.hpp"
#include "csdual/primal.hpp"
#include "csdual/solver.hpp"

namespace py = pybind11;
using namespace csdual;

namespace {

// Reports cross the boundary as plain dicts with the CLI's JSON schema.
py::object to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Json from_py(const py::object& o) { return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>()); }

MixedModel make_model(const std::vector<std::pair<int, double>>& terms, double h) {
  std::vector<Term> t;
  for (const auto& [p, c] : terms) t.push_back({p, c});
  return MixedModel(std::move(t), h);
}

ParisiMeasure make_measure(const std::vector<std::pair<double, double>>& atoms,
                           const std::vector<std::pair<double, double>>& segments,
                           const std::optional<MixedModel>& model) {
  std::vector<Atom> a;
  for (const auto& [q, m] : atoms) a.push_back({q, m});
  std::vector<Segment> s;
  for (const auto& [r1, r2] : segments) s.push_back({r1, r2});
  return ParisiMeasure(std::move(a), std::move(s), model);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parisi measures, primal and dual functionals, and certified solves for mixed spherical spin glasses.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ModelError>(m, "ModelError", base.ptr());
  py::register_exception<SingularPointError>(m, "SingularPointError", base.ptr());
  py::register_exception<InvalidMeasureError>(m, "InvalidMeasureError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
  py::register_exception<InputError>(m, "InputError", base.ptr());

  py::class_<MixedModel>(m, "Model")
      .def(py::init(&make_model), py::arg("terms"), py::arg("h") = 0.0)
      .def_property_readonly("terms",
                             [](const MixedModel& x) {
                               std::vector<std::pair<int, double>> out;
                               for (const Term& t : x.terms()) out.emplace_back(t.degree, t.coeff);
                               return out;
                             })
      .def_property_readonly("h", &MixedModel::field)
      .def("xi", &MixedModel::xi, py::arg("t"), py::arg("order") = 0)
      .def("scaled", &MixedModel::scaled, py::arg("factor"))
      .def("with_field", &MixedModel::with_field, py::arg("h"))
      .def("frak_d", [](const MixedModel& x, double t) { return frak_d(x, t); }, py::arg("t"))
      .def("discriminant", [](const MixedModel& x, double t) { return discriminant(x, t); }, py::arg("t"))
      .def("to_dict", [](const MixedModel& x) { return to_py(to_json(x)); })
      .def_static("from_dict", [](const py::object& o) { return model_from_json(from_py(o)); })
      .def("__repr__", [](const MixedModel& x) { return "Model(" + to_json(x).dump() + ")"; });

  py::class_<ParisiMeasure>(m, "Measure")
      .def(py::init(&make_measure), py::arg("atoms"), py::arg("segments") = std::vector<std::pair<double, double>>{},
           py::arg("model") = std::nullopt)
      .def_static("dirac", &ParisiMeasure::dirac, py::arg("q"))
      .def_property_readonly("atoms",
                             [](const ParisiMeasure& x) {
                               std::vector<std::pair<double, double>> out;
                               for (const Atom& a : x.atoms()) out.emplace_back(a.q, a.m);
                               return out;
                             })
      .def_property_readonly("segments",
                             [](const ParisiMeasure& x) {
                               std::vector<std::pair<double, double>> out;
                               for (const Segment& s : x.segments()) out.emplace_back(s.r1, s.r2);
                               return out;
                             })
      .def("segment_mass", &ParisiMeasure::segment_mass, py::arg("j"))
      .def("total_mass", &ParisiMeasure::total_mass)
      .def("cdf", &ParisiMeasure::cdf, py::arg("s"))
      .def("phi", &ParisiMeasure::phi, py::arg("t"))
      .def("to_dict", [](const ParisiMeasure& x) { return to_py(to_json(x)); })
      .def_static("from_dict", [](const py::object& o, const MixedModel& model) { return measure_from_json(from_py(o), model); },
                  py::arg("data"), py::arg("model"));

  m.def("sign_pattern", [](const MixedModel& x, double root_tol) { return to_py(to_json(sign_pattern(x, root_tol))); },
        py::arg("model"), py::arg("root_tol") = 1e-12);

  m.def(
      "primal_value",
      [](const MixedModel& x, const ParisiMeasure& mu, double quad_tol) {
        PrimalOptions o;
        o.quad_tol = quad_tol;
        return primal_value(x, mu, o);
      },
      py::arg("model"), py::arg("measure"), py::arg("quad_tol") = 1e-11);

  m.def(
      "mass_gradient",
      [](const MixedModel& x, const ParisiMeasure& mu, double q) { return mass_gradient(x, mu, q); }, py::arg("model"),
      py::arg("measure"), py::arg("q"));

  m.def(
      "dual_value",
      [](const MixedModel& x, const ParisiMeasure& mu, double quad_tol) { return dual_value(DualFunction(x, mu), quad_tol); },
      py::arg("model"), py::arg("measure"), py::arg("quad_tol") = 1e-11);

  m.def(
      "gap_function", [](const MixedModel& x, const ParisiMeasure& mu, double t) { return gap_function(x, mu, t); },
      py::arg("model"), py::arg("measure"), py::arg("t"));

  m.def(
      "certify",
      [](const MixedModel& x, const ParisiMeasure& mu, double gap_tol, double coin_tol, double quad_tol) {
        CertifyOptions o;
        o.gap_tol = gap_tol;
        o.coin_tol = coin_tol;
        o.quad_tol = quad_tol;
        return to_py(to_json(certify(x, mu, o)));
      },
      py::arg("model"), py::arg("measure"), py::arg("gap_tol") = 1e-8, py::arg("coin_tol") = 1e-7,
      py::arg("quad_tol") = 1e-11);

  m.def(
      "solve",
      [](const MixedModel& x, double gap_tol, int n_starts, int max_iterations, std::uint64_t seed) {
        SolveOptions o;
        o.gap_tol = gap_tol;
        o.n_starts = n_starts;
        o.max_iterations = max_iterations;
        o.seed = seed;
        SolveReport r;
        {
          py::gil_scoped_release release;
          r = solve(x, o);
        }
        return to_py(to_json(r));
      },
      py::arg("model"), py::arg("gap_tol") = 1e-8, py::arg("n_starts") = 8, py::arg("max_iterations") = 4000,
      py::arg("seed") = 0);

  m.def(
      "rs_quick_tests", [](const MixedModel& x) { return to_py(to_json(rs_quick_tests(x))); }, py::arg("model"));

  m.def(
      "grid_oracle",
      [](const MixedModel& x, int N, double fw_tol) {
        OracleOptions o;
        o.fw_tol = fw_tol;
        OracleResult r;
        {
          py::gil_scoped_release release;
          r = grid_oracle(x, N, o);
        }
        return to_py(to_json(r));
      },
      py::arg("model"), py::arg("N") = 1000, py::arg("fw_tol") = 1e-10);
}
