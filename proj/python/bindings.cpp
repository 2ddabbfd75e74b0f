#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nearfield/dtn.hpp"
#include "nearfield/emission.hpp"
#include "nearfield/errors.hpp"
#include "nearfield/forward.hpp"
#include "nearfield/inversion.hpp"
#include "nearfield/io.hpp"
#include "nearfield/layer_potentials.hpp"
#include "nearfield/scene.hpp"
#include "nearfield/specfun.hpp"

namespace py = pybind11;
using namespace nearfield;

namespace {

std::array<double, 3> to_array(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

Eigen::MatrixXd points_matrix(const std::vector<Vec3>& pts) {
  Eigen::MatrixXd m(pts.size(), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(i) << pts[i].x, pts[i].y, pts[i].z;
  return m;
}

py::dict report_dict(const ValidationReport& r) {
  py::list checks;
  for (const auto& c : r.checks) {
    checks.append(py::dict(py::arg("name") = c.name, py::arg("passed") = c.passed, py::arg("margin") = c.margin,
                           py::arg("detail") = c.detail));
  }
  return py::dict(py::arg("passed") = r.passed(), py::arg("checks") = checks);
}

}  // namespace

PYBIND11_MODULE(_nearfield, m) {
  m.doc() = "Near-field scattering by radial potentials";
  m.attr("__version__") = tool_version();

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<PoleError>(m, "PoleError", numerical.ptr());
  py::register_exception<InvertibilityError>(m, "InvertibilityError", numerical.ptr());
  py::register_exception<RankError>(m, "RankError", numerical.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", numerical.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", numerical.ptr());
  py::register_exception<BoundsError>(m, "BoundsError", numerical.ptr());
  py::register_exception<ProximityError>(m, "ProximityError", numerical.ptr());

  py::class_<SceneConfig>(m, "SceneConfig")
      .def(py::init<>())
      .def_readwrite("k", &SceneConfig::k)
      .def_readwrite("a", &SceneConfig::a)
      .def_readwrite("rho", &SceneConfig::rho)
      .def_property(
          "center", [](const SceneConfig& s) { return to_array(s.center); },
          [](SceneConfig& s, const std::array<double, 3>& c) { s.center = to_vec(c); })
      .def_readwrite("l_max", &SceneConfig::l_max)
      .def_readwrite("n_quad_s", &SceneConfig::n_quad_s)
      .def_readwrite("eps_ball", &SceneConfig::eps_ball)
      .def_readwrite("delta_eig", &SceneConfig::delta_eig)
      .def_readwrite("boundary_quad_order", &SceneConfig::boundary_quad_order)
      .def("__repr__", [](const SceneConfig& s) {
        return "SceneConfig(k=" + std::to_string(s.k) + ", a=" + std::to_string(s.a) + ", rho=" +
               std::to_string(s.rho) + ", l_max=" + std::to_string(s.l_max) + ")";
      });

  py::class_<RadialPotential>(m, "RadialPotential")
      .def(py::init<>())
      .def(py::init([](std::vector<double> b, std::vector<double> v) { return RadialPotential{std::move(b), std::move(v)}; }),
           py::arg("breakpoints"), py::arg("values"))
      .def_readwrite("breakpoints", &RadialPotential::breakpoints)
      .def_readwrite("values", &RadialPotential::values)
      .def_static("free_space", &RadialPotential::free_space)
      .def("is_free", &RadialPotential::is_free)
      .def("__call__", [](const RadialPotential& p, double r) { return evaluate_potential(p, r); });

  m.def("default_scene", &default_scene);
  m.def("default_potential", &default_potential);
  m.def("validate_scene", [](const SceneConfig& s, const RadialPotential& p) { return report_dict(validate_scene(s, p)); });
  m.def("load_scene", [](const std::string& path) {
    const auto f = load_scene(path);
    return py::make_tuple(f.scene, f.potential);
  });
  m.def("parse_scene", [](const std::string& text) {
    const auto f = parse_scene(text);
    return py::make_tuple(f.scene, f.potential);
  });
  m.def("scene_to_toml", &scene_to_toml);
  m.def("scene_hash", [](const SceneConfig& s, const RadialPotential& p) { return hex_digest(scene_hash(s, p)); });

  m.def("spherical_bessel_j", &spherical_bessel_j, py::arg("l"), py::arg("x"));
  m.def("spherical_bessel_y", &spherical_bessel_y, py::arg("l"), py::arg("x"));
  m.def("spherical_hankel1", &spherical_hankel1, py::arg("l"), py::arg("x"));
  m.def("spherical_harmonic", &spherical_harmonic, py::arg("l"), py::arg("m"), py::arg("theta"), py::arg("phi"));

  m.def("dtn_interior_free", &dtn_interior_free, py::arg("l"), py::arg("k"), py::arg("a"), py::arg("delta_eig") = 1e-6);
  m.def("dtn_exterior", &dtn_exterior, py::arg("l"), py::arg("k"), py::arg("a"));
  m.def(
      "dtn_potential",
      [](const RadialPotential& p, int l, double k, double a) { return dtn_potential(p, l, k, a); }, py::arg("potential"),
      py::arg("l"), py::arg("k"), py::arg("a"));

  py::class_<ForwardSolver>(m, "ForwardSolver")
      .def(py::init([](const SceneConfig& s, const RadialPotential& p) { return std::make_unique<ForwardSolver>(s, p); }),
           py::arg("scene"), py::arg("potential"))
      .def_property_readonly("f0", [](const ForwardSolver& f) { return f.f0().entries; })
      .def_property_readonly("fout", [](const ForwardSolver& f) { return f.fout().entries; })
      .def_property_readonly("fn", [](const ForwardSolver& f) { return f.fn().entries; })
      .def_property_readonly("middle", &ForwardSolver::middle)
      .def_property_readonly("source_points",
                             [](const ForwardSolver& f) { return points_matrix(f.discretization().source.points); })
      .def_property_readonly("source_weights", [](const ForwardSolver& f) { return f.discretization().source_weights(); })
      .def("nearfield_direct", [](const ForwardSolver& f) { return f.nearfield_direct().op.matrix; })
      .def("nearfield_factorized", [](const ForwardSolver& f) { return f.nearfield_factorized().op.matrix; })
      .def("L", [](const ForwardSolver& f) { return assemble_L(f.discretization()).matrix; })
      .def("Lstar", [](const ForwardSolver& f) { return assemble_Lstar(f.discretization()).matrix; })
      .def("scattered_trace", [](const ForwardSolver& f, const CVector& phi) { return f.solve_direct(phi).trace_s; })
      .def("truncation_tail", &ForwardSolver::truncation_tail);

  m.def("relative_spectral_difference", &relative_spectral_difference);

  m.def(
      "synthesize",
      [](const ForwardSolver& f, const CVector& phi, int steps, const std::string& method, bool check) {
        EmissionConfig cfg;
        cfg.steps = steps;
        if (method == "tsvd") {
          cfg.regularization = RegularizationKind::TruncatedSvd;
        } else if (method != "tikhonov") {
          throw ValidationError("method must be 'tikhonov' or 'tsvd'");
        }
        const auto& d = f.discretization();
        const EmissionSynthesizer es(d.scene, d.source, cfg);
        const NearFieldCheck nc{[&](const CVector& p) { return f.emitted_scattered_trace(p); },
                                f.solve_direct(phi).trace_s};
        py::list out;
        for (const auto& r : es.path(phi, check ? &nc : nullptr)) {
          out.append(py::dict(py::arg("step") = r.step, py::arg("parameter") = r.parameter, py::arg("psi") = r.psi,
                              py::arg("residual") = r.residual_h32, py::arg("relative_residual") = r.relative_residual,
                              py::arg("relative_nearfield_error") = r.relative_nearfield_error));
        }
        return out;
      },
      py::arg("solver"), py::arg("phi"), py::arg("steps") = 22, py::arg("method") = "tikhonov",
      py::arg("check") = true);

  m.def(
      "recover_dtn",
      [](const ForwardSolver& f, const CMatrix& F, int l_rec, double tau) {
        const auto& d = f.discretization();
        RecoveryConfig cfg;
        cfg.l_rec = l_rec;
        cfg.svd_threshold = tau;
        const auto mid = recover_middle(d, F, assemble_L(d), assemble_Lstar(d), cfg);
        const auto rec = recover_dtn(mid.M.matrix, f.f0(), f.fout(), mid.l_rec);
        return py::dict(py::arg("fn") = rec.fn.entries, py::arg("l_rec") = mid.l_rec,
                        py::arg("leakage") = rec.leakage, py::arg("residual") = mid.residual,
                        py::arg("design_condition") = mid.design_condition);
      },
      py::arg("solver"), py::arg("F"), py::arg("l_rec") = -1, py::arg("tau") = 1e-10);

  m.def(
      "fit_potential",
      [](const std::vector<cdouble>& fn, double k, double a, const std::string& tmpl) {
        const HarmonicDiagonal data{DtnKind::Fn, k, a, fn};
        const auto r = fit_potential(data, data.l_max(), parse_fit_template(tmpl));
        return py::dict(py::arg("potential") = r.potential, py::arg("parameters") = r.parameters,
                        py::arg("misfit") = r.misfit, py::arg("iterations") = r.iterations);
      },
      py::arg("fn"), py::arg("k"), py::arg("a"), py::arg("template"));
}
