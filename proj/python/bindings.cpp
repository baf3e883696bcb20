#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "avgh/cli.hpp"
#include "avgh/config.hpp"
#include "avgh/demos.hpp"
#include "avgh/errors.hpp"
#include "avgh/evolution.hpp"
#include "avgh/gramian.hpp"
#include "avgh/hautus.hpp"
#include "avgh/mintime.hpp"
#include "avgh/perturbation.hpp"

namespace py = pybind11;
using namespace avgh;

namespace {

SystemSpec make_system(const Mat& A, std::optional<Mat> C, std::optional<Mat> B, double tau, std::size_t n_steps,
                       const std::vector<std::pair<TimeProfile, Mat>>& perturbations, bool skew) {
  MatrixFamily a = MatrixFamily::constant(A);
  if (!perturbations.empty()) {
    std::vector<PerturbationTerm> terms;
    for (const auto& [p, m] : perturbations) terms.push_back({p, m});
    a = MatrixFamily::perturbed(A, std::move(terms));
  }
  if (skew) a.claim_skew();
  if (n_steps == 0) n_steps = default_steps(a, tau);
  std::optional<MatrixFamily> c, b;
  if (C) c = MatrixFamily::constant(*C);
  if (B) b = MatrixFamily::constant(*B);
  SystemSpec sys{std::move(a), std::move(c), std::move(b), TimeGrid(tau, n_steps), std::nullopt, true};
  sys.validate();
  return sys;
}

py::dict gramian_dict(const GramianReport& r) {
  py::dict d;
  d["kind"] = to_string(r.kind);
  d["G"] = r.G;
  d["lambda_min"] = r.lambda_min;
  d["lambda_max"] = r.lambda_max;
  d["warnings"] = r.warnings;
  return d;
}

py::dict artifacts_dict(const RunArtifacts& a) {
  py::dict files;
  for (const auto& [name, text] : a.files) files[py::str(name)] = py::bytes(text);
  py::dict d;
  d["files"] = files;
  d["violations"] = a.violations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_avgh, m) {
  m.doc() = "Averaged Hautus tests and observability of non-autonomous systems";
  m.attr("__version__") = AVGH_VERSION;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", error.ptr());

  py::class_<TimeProfile>(m, "TimeProfile")
      .def_static("constant", &TimeProfile::constant, py::arg("amplitude"))
      .def_static("sinusoid", &TimeProfile::sinusoid, py::arg("amplitude"), py::arg("frequency"),
                  py::arg("phase") = 0.0)
      .def_static("piecewise", &TimeProfile::piecewise, py::arg("breakpoints"), py::arg("values"))
      .def("truncated", &TimeProfile::truncated, py::arg("t0"))
      .def("__call__", [](const TimeProfile& p, double t) { return p(t); });

  py::class_<SystemSpec>(m, "System")
      .def(py::init(&make_system), py::arg("A"), py::arg("C") = std::nullopt, py::arg("B") = std::nullopt,
           py::kw_only(), py::arg("tau"), py::arg("n_steps") = 0,
           py::arg("perturbations") = std::vector<std::pair<TimeProfile, Mat>>{}, py::arg("skew") = false)
      .def_property_readonly("dim", &SystemSpec::dim)
      .def_property_readonly("tau", [](const SystemSpec& s) { return s.grid.tau(); })
      .def_property_readonly("n_steps", [](const SystemSpec& s) { return s.grid.n_steps(); })
      .def("A", [](const SystemSpec& s, double t) { return Mat(s.A(t)); }, py::arg("t"));

  m.def("propagator", [](const SystemSpec& s) { return Mat(propagate(s).from_origin(s.grid.n_steps())); },
        "U(tau, 0)", py::arg("system"));
  m.def("observability_gramian", [](const SystemSpec& s) { return gramian_dict(observability_gramian(s, propagate(s))); },
        py::arg("system"));
  m.def("averaged_gramian", [](const SystemSpec& s) { return gramian_dict(averaged_gramian(s, propagate(s))); },
        py::arg("system"));
  m.def("controllability_gramian",
        [](const SystemSpec& s) { return gramian_dict(controllability_gramian(s, propagate(s))); }, py::arg("system"));
  m.def("admissibility_constant", [](const SystemSpec& s) { return admissibility_constant(s, propagate(s)).M_tau; },
        py::arg("system"));
  m.def("duality_defect", [](const SystemSpec& s) { return duality_defect(s, propagate(s)); }, py::arg("system"));

  py::class_<MomentMatrices>(m, "MomentMatrices")
      .def_readonly("P_bar", &MomentMatrices::P_bar)
      .def_readonly("A_bar", &MomentMatrices::A_bar)
      .def_readonly("S_bar", &MomentMatrices::S_bar)
      .def_readonly("tau", &MomentMatrices::tau)
      .def("Q", &MomentMatrices::Q, py::arg("xi"));
  m.def("moment_matrices", &moment_matrices, py::arg("system"));

  py::class_<AH2Verdict>(m, "AH2Verdict")
      .def_readonly("holds", &AH2Verdict::holds)
      .def_readonly("min_margin", &AH2Verdict::min_margin)
      .def_readonly("xi_star", &AH2Verdict::xi_star)
      .def_readonly("Xi", &AH2Verdict::Xi)
      .def_readonly("tail_certified", &AH2Verdict::tail_certified)
      .def_readonly("points", &AH2Verdict::points)
      .def_readonly("reason", &AH2Verdict::reason);
  m.def("verify_AH2", [](const MomentMatrices& mm, double mv, double M, double sigma) { return verify_AH2(mm, mv, M, sigma); },
        py::arg("moments"), py::arg("m"), py::arg("M"), py::arg("sigma_max"));
  m.def(
      "fit_constants",
      [](const MomentMatrices& mm, std::vector<double> grid, double sigma) {
        if (grid.empty()) grid = default_m_grid(mm);
        py::list out;
        for (const auto& p : fit_constants(mm, grid, sigma))
          out.append(py::make_tuple(p.m, p.M.finite ? p.M.value : std::numeric_limits<double>::infinity()));
        return out;
      },
      "List of (m, M) with M = inf where no finite constant exists.", py::arg("moments"),
      py::arg("m_grid") = std::vector<double>{}, py::arg("sigma_max"));
  m.def(
      "constants_from_observability",
      [](double kappa, double K, double tau) {
        const auto c = constants_from_observability(kappa, K, tau);
        return py::make_tuple(c.m, c.M);
      },
      py::arg("kappa"), py::arg("K_adm"), py::arg("tau"));

  py::class_<TimeValue>(m, "TimeValue")
      .def_readonly("feasible", &TimeValue::feasible)
      .def_readonly("value", &TimeValue::value)
      .def_readonly("reason", &TimeValue::reason)
      .def("__repr__", &TimeValue::to_string);
  py::class_<OptimalR>(m, "OptimalR")
      .def_readonly("feasible", &OptimalR::feasible)
      .def_readonly("r_infinite", &OptimalR::r_infinite)
      .def_readonly("r", &OptimalR::r)
      .def_readonly("tau_min", &OptimalR::tau_min);
  py::class_<HardyResult>(m, "HardyResult")
      .def_readonly("B", &HardyResult::B)
      .def_readonly("sqrt_B", &HardyResult::sqrt_B)
      .def_readonly("x", &HardyResult::x)
      .def_readonly("y", &HardyResult::y);
  py::class_<FCriterion>(m, "FCriterion")
      .def_readonly("f_max", &FCriterion::f_max)
      .def_readonly("x", &FCriterion::x)
      .def_readonly("y", &FCriterion::y)
      .def_readonly("satisfied", &FCriterion::satisfied)
      .def_readonly("f_quarter", &FCriterion::f_quarter);

  m.def("tau_star", &tau_star, py::arg("M"), py::arg("L") = 0.0);
  m.def("tau_star_r", &tau_star_r, py::arg("M"), py::arg("L"), py::arg("r"));
  m.def("optimal_r", &optimal_r, py::arg("M"), py::arg("L") = 0.0);
  m.def("kappa_sine", &kappa_sine, py::arg("M"), py::arg("L"), py::arg("tau"));
  m.def("tau_double_star", &tau_double_star, py::arg("k"), py::arg("K"), py::arg("M"), py::arg("L") = 0.0,
        py::arg("omega") = 0.0);
  m.def("f_criterion", &f_criterion, py::arg("k"), py::arg("K"), py::arg("M"), py::arg("L"), py::arg("omega"),
        py::arg("tau"), py::arg("grid") = 200);
  m.def(
      "hardy_B",
      [](const std::function<double(double)>& w, const std::function<double(double)>& v, double tau, std::size_t res) {
        return hardy_B(w, v, tau, res);
      },
      py::arg("w"), py::arg("v"), py::arg("tau"), py::arg("resolution") = 400);

  m.def("mu", [](const SystemSpec& s, double M) { return mu(s.A.perturbation(), M, s.grid); }, py::arg("system"),
        py::arg("M"));
  m.def(
      "transferred_constants",
      [](double mv, double M, double mu_value) {
        const auto t = transferred_constants(mv, M, mu_value);
        return py::make_tuple(t.m, t.M);
      },
      py::arg("m"), py::arg("M"), py::arg("mu"));

  m.def(
      "run_config_text",
      [](const std::string& text, std::optional<std::string> command, std::optional<std::uint64_t> seed) {
        ParsedConfig pc;
        RunArtifacts a;
        {
          py::gil_scoped_release release;
          pc = parse_config_text(text, command, seed);
          a = run_command(pc);
        }
        return artifacts_dict(a);
      },
      "Parses an INI config and runs its command in memory; returns {'files': {name: bytes}, 'violations': n}.",
      py::arg("text"), py::arg("command") = std::nullopt, py::arg("seed") = std::nullopt);
  m.def(
      "run_config",
      [](const std::string& path, std::optional<std::string> command, std::optional<std::uint64_t> seed) {
        ParsedConfig pc;
        RunArtifacts a;
        {
          py::gil_scoped_release release;
          pc = parse_config(path, command, seed);
          a = run_command(pc);
        }
        return artifacts_dict(a);
      },
      py::arg("path"), py::arg("command") = std::nullopt, py::arg("seed") = std::nullopt);
}
