#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jlab/asymptotics.hpp"
#include "jlab/runner.hpp"
#include "jlab/scenario.hpp"
#include "jlab/solution.hpp"

namespace py = pybind11;
using namespace jlab;

namespace {

Scenario scenario_from_text(const std::string& text) {
  try {
    return scenario_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("scenario json: ") + e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Marchenko fields and asymptotic soliton trains for the Johnson equation";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def(
      "one_soliton",
      [](double p, double q, double c, double x, double y, double t) {
        return one_soliton({p, q, c}, x, y, t);
      },
      py::arg("p"), py::arg("q"), py::arg("c"), py::arg("x"), py::arg("y"), py::arg("t"));

  m.def(
      "atom_field",
      [](double p, double q, double c, double x, double y, double t, double b) {
        const SpectralDomain d(AmplitudeProfile::constant(b * b, b * b, std::min(0.2, 0.5 * q)),
                               RoofMode::max_consistent, {-2.0, 2.0});
        MeasureSpec ms;
        ms.atoms.push_back({{p, q}, c});
        const FieldSample s = eval_v(ms, d, x, y, t);
        return py::dict(py::arg("v") = s.v, py::arg("min_eig") = s.diag.min_eig,
                        py::arg("im_k_diag") = s.diag.im_k_diag, py::arg("cond_est") = s.diag.cond_est);
      },
      "Marchenko field of one atom (p, q, c) inside a flat roof of height b.", py::arg("p"), py::arg("q"),
      py::arg("c"), py::arg("x"), py::arg("y"), py::arg("t"), py::arg("b") = 2.5);

  m.def(
      "gram_determinants",
      [](int n) {
        const GramPair g = gram_pair(n);
        return py::make_tuple(g.gamma_det, g.q_det);
      },
      py::arg("n"));

  m.def(
      "phase_shift",
      [](const std::string& scenario_text, int n, double y, const std::string& norm) {
        const PreparedScenario p = prepare(scenario_from_text(scenario_text));
        const FrontGeometry geo = front_geometry(p.domain, p.scenario.measure, y);
        return phi_n(phase_normalization_from_string(norm), p.domain.profile(), geo, n);
      },
      py::arg("scenario_json"), py::arg("n"), py::arg("y") = 0.0, py::arg("normalization") = "general");

  m.def("builtin_names", &builtin_names);
  m.def(
      "builtin_json", [](const std::string& name) { return to_json(builtin_scenario(name)).dump(); },
      py::arg("name"));
  m.def(
      "scenario_hash", [](const std::string& text) { return scenario_hash(scenario_from_text(text)); },
      py::arg("scenario_json"));

  m.def(
      "validate",
      [](const std::string& text) {
        const PreparedScenario p = prepare(scenario_from_text(text));
        return py::make_tuple(p.report.ok(), p.report.to_text());
      },
      py::arg("scenario_json"));

  m.def(
      "run",
      [](const std::string& text, const std::string& out_dir, unsigned workers, bool use_cache,
         bool write) {
        const Scenario sc = scenario_from_text(text);
        const PreparedScenario p = prepare(sc);
        RunOptions o;
        o.out_dir = out_dir;
        o.workers = workers;
        o.use_cache = use_cache;
        RunRecord rec;
        {
          py::gil_scoped_release release;
          rec = run(p, o);
          if (write) write_outputs(rec, sc, o);
        }
        return py::make_tuple(rec.csv(), rec.summary().dump());
      },
      py::arg("scenario_json"), py::arg("out_dir") = ".", py::arg("workers") = 0,
      py::arg("use_cache") = false, py::arg("write") = false);
}
