#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "selfloc/dispersion.hpp"
#include "selfloc/muon.hpp"
#include "selfloc/observables.hpp"
#include "selfloc/scf.hpp"
#include "selfloc/version.hpp"

namespace py = pybind11;
using namespace selfloc;

PYBIND11_MODULE(selfloc, m) {
  m.doc() = "self-localized quasi-particle solver";
  m.attr("__version__") = kVersion;
  m.attr("alpha_default") = kAlphaDefault;

  py::register_exception<SolverError>(m, "SolverError");

  py::enum_<GridScheme>(m, "GridScheme")
      .value("uniform", GridScheme::uniform)
      .value("log_dense_origin", GridScheme::log_dense_origin);

  py::class_<RadialGrid>(m, "RadialGrid")
      .def_readonly("points", &RadialGrid::points)
      .def_readonly("weights", &RadialGrid::weights)
      .def_readonly("x_min", &RadialGrid::x_min)
      .def_readonly("x_max", &RadialGrid::x_max)
      .def("__len__", &RadialGrid::size);

  py::class_<ShootOptions>(m, "ShootOptions")
      .def(py::init<>())
      .def_readwrite("x_match", &ShootOptions::x_match)
      .def_readwrite("x_series", &ShootOptions::x_series)
      .def_readwrite("ode_rtol", &ShootOptions::ode_rtol)
      .def_readwrite("bracket_lo", &ShootOptions::bracket_lo)
      .def_readwrite("bracket_hi", &ShootOptions::bracket_hi)
      .def_readwrite("scan_points", &ShootOptions::scan_points)
      .def_readwrite("root_tol", &ShootOptions::root_tol);

  py::class_<ScfConfig>(m, "ScfConfig")
      .def(py::init<>())
      .def_readwrite("n_points", &ScfConfig::n_points)
      .def_readwrite("x_max", &ScfConfig::x_max)
      .def_readwrite("x_min", &ScfConfig::x_min)
      .def_readwrite("scheme", &ScfConfig::scheme)
      .def_readwrite("max_outer_iterations", &ScfConfig::max_outer_iterations)
      .def_readwrite("mixing", &ScfConfig::mixing)
      .def_readwrite("tol_residual", &ScfConfig::tol_residual)
      .def_readwrite("a_initial", &ScfConfig::a_initial)
      .def_readwrite("continuation_steps", &ScfConfig::continuation_steps)
      .def_readwrite("verbose", &ScfConfig::verbose)
      .def_readwrite("shoot", &ScfConfig::shoot);

  py::class_<RadialState>(m, "RadialState")
      .def_readonly("u", &RadialState::u)
      .def_readonly("v", &RadialState::v)
      .def_readonly("norm", &RadialState::norm)
      .def_readonly("nodes_u", &RadialState::nodes_u)
      .def_readonly("epsilon", &RadialState::epsilon);

  py::class_<PotentialProfile>(m, "PotentialProfile")
      .def_readonly("phi", &PotentialProfile::phi)
      .def_readonly("phi_at_zero", &PotentialProfile::phi_at_zero);

  py::class_<ScfSolution>(m, "ScfSolution")
      .def_readonly("grid", &ScfSolution::grid)
      .def_readonly("state", &ScfSolution::state)
      .def_readonly("rho", &ScfSolution::rho)
      .def_readonly("phi0", &ScfSolution::phi0)
      .def_readonly("a", &ScfSolution::a)
      .def_readonly("residual_history", &ScfSolution::residual_history)
      .def_readonly("converged", &ScfSolution::converged)
      .def_readonly("iterations", &ScfSolution::iterations);

  py::class_<EnergyReport>(m, "EnergyReport")
      .def_readonly("T", &EnergyReport::T)
      .def_readonly("Pi", &EnergyReport::Pi)
      .def_readonly("a_virial", &EnergyReport::a_virial)
      .def_readonly("E0_units_m0", &EnergyReport::E0_units_m0)
      .def_readonly("virial_residual", &EnergyReport::virial_residual);

  py::class_<PhysicalConstants>(m, "PhysicalConstants")
      .def_readonly("alpha", &PhysicalConstants::alpha)
      .def_readonly("m", &PhysicalConstants::m)
      .def_readonly("a0", &PhysicalConstants::a0)
      .def_readonly("T", &PhysicalConstants::T)
      .def_readonly("alpha0", &PhysicalConstants::alpha0)
      .def_readonly("e0", &PhysicalConstants::e0)
      .def_readonly("xi", &PhysicalConstants::xi)
      .def_readonly("C", &PhysicalConstants::C)
      .def_readonly("m0_over_m", &PhysicalConstants::m0_over_m)
      .def_readonly("Z0", &PhysicalConstants::Z0)
      .def_readonly("L0_over_m", &PhysicalConstants::L0_over_m);

  py::class_<MuonResult>(m, "MuonResult")
      .def_readonly("epsilon1", &MuonResult::epsilon1)
      .def_readonly("epsilon2", &MuonResult::epsilon2)
      .def_readonly("I_mu", &MuonResult::I_mu)
      .def_readonly("I_1mu", &MuonResult::I_1mu)
      .def_readonly("ratio_coefficient", &MuonResult::ratio_coefficient)
      .def_readonly("mass_ratio", &MuonResult::mass_ratio)
      .def_readonly("level_difference", &MuonResult::level_difference)
      .def_readonly("orthogonality", &MuonResult::orthogonality)
      .def_readonly("ground", &MuonResult::ground)
      .def_readonly("excited", &MuonResult::excited);

  py::class_<FormFactorTable>(m, "FormFactorTable")
      .def_readonly("momenta", &FormFactorTable::momenta)
      .def_readonly("values", &FormFactorTable::values)
      .def_readonly("L0_fit", &FormFactorTable::L0_fit);

  py::class_<OverlapResult>(m, "OverlapResult")
      .def_readonly("Lambda", &OverlapResult::Lambda)
      .def_readonly("log10_lifetime_seconds",
                    &OverlapResult::log10_lifetime_seconds)
      .def_readonly("overlap_I", &OverlapResult::overlap_I);

  py::enum_<Branch>(m, "Branch")
      .value("electron", Branch::electron)
      .value("positron", Branch::positron);

  py::class_<DispersionCoefficients>(m, "DispersionCoefficients")
      .def_readonly("P", &DispersionCoefficients::P)
      .def_readonly("branch", &DispersionCoefficients::branch)
      .def_readonly("E", &DispersionCoefficients::E)
      .def_readonly("E0", &DispersionCoefficients::E0)
      .def_readonly("L", &DispersionCoefficients::L)
      .def_readonly("K", &DispersionCoefficients::K)
      .def_readonly("L1", &DispersionCoefficients::L1)
      .def_readonly("K1", &DispersionCoefficients::K1);

  m.def("build_grid", &build_grid, py::arg("n_points"), py::arg("x_max"),
        py::arg("scheme") = GridScheme::log_dense_origin,
        py::arg("x_min") = 1e-4);
  m.def(
      "integrate",
      [](const RadialGrid& g, const std::vector<double>& f) {
        return integrate(g, f);
      },
      py::arg("grid"), py::arg("samples"));
  m.def(
      "sine_transform",
      [](const RadialGrid& g, const std::vector<double>& d, double t) {
        return sine_transform(g, d, t);
      },
      py::arg("grid"), py::arg("density"), py::arg("t"));
  m.def(
      "compute_potential",
      [](const RadialGrid& g, const std::vector<double>& rho) {
        return compute_potential(g, rho);
      },
      py::arg("grid"), py::arg("rho"));
  m.def("scf_solve", &scf_solve, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "continuation_solve",
      [](const ScfConfig& c, const std::vector<double>& path) {
        return continuation_solve(c, path);
      },
      py::arg("config"), py::arg("a_path"),
      py::call_guard<py::gil_scoped_release>());
  m.def("energy_report", &energy_report, py::arg("solution"),
        py::arg("alpha") = kAlphaDefault);
  m.def("derive_constants", &derive_constants, py::arg("a0"), py::arg("T"),
        py::arg("alpha") = kAlphaDefault, py::arg("m") = 1.0);
  m.def("solve_muon_adiabatic", &solve_muon_adiabatic, py::arg("solution"),
        py::arg("constants"), py::arg("adiabatic") = true,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "form_factor",
      [](const ScfSolution& s, const std::vector<double>& momenta,
         double alpha) { return form_factor(s, momenta, alpha); },
      py::arg("solution"), py::arg("momenta"),
      py::arg("alpha") = kAlphaDefault);
  m.def(
      "overlap_lambda",
      [](const RadialGrid& g, const std::vector<double>& pe,
         const std::vector<double>& pm, const PhysicalConstants& c) {
        return overlap_lambda(g, pe, pm, c);
      },
      py::arg("grid"), py::arg("phi_electron"), py::arg("phi_muon"),
      py::arg("constants"));
  m.def("coefficients", &coefficients, py::arg("P"), py::arg("E0"),
        py::arg("branch"));
  m.def("residual", &residual, py::arg("coefficients"));
  m.def("normalized_determinant", &normalized_determinant, py::arg("P"),
        py::arg("E"), py::arg("E0"));
}
