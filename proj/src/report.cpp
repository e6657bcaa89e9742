#include "selfloc/report.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfloc/dispersion.hpp"

namespace selfloc {

namespace {

using Kind = SolverError::Kind;
using nlohmann::json;

double get_number(const json& v, const std::string& name) {
  if (!v.is_number())
    throw SolverError(Kind::invalid_argument,
                      "config field " + name + " must be a number");
  return v.get<double>();
}

int get_integer(const json& v, const std::string& name) {
  if (!v.is_number_integer())
    throw SolverError(Kind::invalid_argument,
                      "config field " + name + " must be an integer");
  return v.get<int>();
}

std::string get_string(const json& v, const std::string& name) {
  if (!v.is_string())
    throw SolverError(Kind::invalid_argument,
                      "config field " + name + " must be a string");
  return v.get<std::string>();
}

GridScheme parse_scheme(const std::string& s) {
  if (s == "uniform") return GridScheme::uniform;
  if (s == "log_dense_origin" || s == "log-dense-origin")
    return GridScheme::log_dense_origin;
  throw SolverError(Kind::invalid_argument,
                    "config field grid.scheme must be \"uniform\" or "
                    "\"log_dense_origin\"");
}

const char* scheme_name(GridScheme s) {
  return s == GridScheme::uniform ? "uniform" : "log_dense_origin";
}

void apply_grid(const json& j, RunConfig& rc) {
  if (!j.is_object())
    throw SolverError(Kind::invalid_argument,
                      "config field grid must be an object");
  for (const auto& [key, val] : j.items()) {
    if (key == "n_points")
      rc.scf.n_points = get_integer(val, "grid.n_points");
    else if (key == "x_max")
      rc.scf.x_max = get_number(val, "grid.x_max");
    else if (key == "x_min")
      rc.scf.x_min = get_number(val, "grid.x_min");
    else if (key == "scheme")
      rc.scf.scheme = parse_scheme(get_string(val, "grid.scheme"));
    else
      throw SolverError(Kind::invalid_argument,
                        "unknown config field: grid." + key);
  }
}

void apply_scf(const json& j, RunConfig& rc) {
  if (!j.is_object())
    throw SolverError(Kind::invalid_argument,
                      "config field scf must be an object");
  for (const auto& [key, val] : j.items()) {
    if (key == "max_outer_iterations")
      rc.scf.max_outer_iterations =
          get_integer(val, "scf.max_outer_iterations");
    else if (key == "mixing")
      rc.scf.mixing = get_number(val, "scf.mixing");
    else if (key == "tol_residual")
      rc.scf.tol_residual = get_number(val, "scf.tol_residual");
    else if (key == "a_initial")
      rc.scf.a_initial = get_number(val, "scf.a_initial");
    else if (key == "continuation_steps")
      rc.scf.continuation_steps = get_integer(val, "scf.continuation_steps");
    else
      throw SolverError(Kind::invalid_argument,
                        "unknown config field: scf." + key);
  }
}

json config_to_json(const RunConfig& rc) {
  json j;
  j["grid"]["n_points"] = int(rc.scf.n_points);
  j["grid"]["x_max"] = rc.scf.x_max;
  j["grid"]["x_min"] = rc.scf.x_min;
  j["grid"]["scheme"] = scheme_name(rc.scf.scheme);
  j["scf"]["max_outer_iterations"] = rc.scf.max_outer_iterations;
  j["scf"]["mixing"] = rc.scf.mixing;
  j["scf"]["tol_residual"] = rc.scf.tol_residual;
  j["scf"]["a_initial"] = rc.scf.a_initial;
  j["scf"]["continuation_steps"] = rc.scf.continuation_steps;
  j["alpha"] = rc.alpha;
  j["momenta"] = rc.momenta;
  j["out_dir"] = rc.out_dir;
  j["verbosity"] = rc.verbosity;
  return j;
}

json value_to_json(const ReportValue& v) {
  json o;
  if (v.value)
    o["value"] = *v.value;
  else
    o["skipped"] = v.skipped_reason;
  return o;
}

ReportValue value_from_json(const json& o) {
  ReportValue v;
  if (o.contains("value"))
    v.value = o.at("value").get<double>();
  else
    v.skipped_reason = o.at("skipped").get<std::string>();
  return v;
}

struct ScalarSlot {
  const char* name;
  ReportValue RunReport::* member;
};

constexpr ScalarSlot kScalarSlots[] = {
    {"a0", &RunReport::a0},
    {"T", &RunReport::T},
    {"Pi", &RunReport::Pi},
    {"virial_residual", &RunReport::virial_residual},
    {"alpha0", &RunReport::alpha0},
    {"e0", &RunReport::e0},
    {"xi", &RunReport::xi},
    {"C", &RunReport::C_coeff},
    {"m0_over_m", &RunReport::m0_over_m},
    {"Z0", &RunReport::Z0},
    {"L0_over_m", &RunReport::L0_over_m},
    {"E0_units_m0", &RunReport::E0_units_m0},
    {"epsilon1", &RunReport::epsilon1},
    {"epsilon2", &RunReport::epsilon2},
    {"I_mu", &RunReport::I_mu},
    {"I_1mu", &RunReport::I_1mu},
    {"ratio_coefficient", &RunReport::ratio_coefficient},
    {"mass_ratio", &RunReport::mass_ratio},
    {"level_difference", &RunReport::level_difference},
    {"orthogonality", &RunReport::orthogonality},
    {"Lambda", &RunReport::Lambda},
    {"log10_lifetime_seconds", &RunReport::log10_lifetime_seconds},
    {"formfactor_L0", &RunReport::formfactor_L0},
};

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw SolverError(Kind::io, "cannot open for writing: " + path);
  return out;
}

void check_finite(double x, const std::string& path) {
  if (!std::isfinite(x))
    throw SolverError(Kind::io, "non-finite value in output table: " + path);
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw SolverError(Kind::io, "write failed: " + path);
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

std::vector<double> default_momenta() {
  std::vector<double> out;
  out.push_back(0.0);
  const int n = 49;
  const double lo = 15.0, hi = 1500.0;
  for (int k = 0; k < n; ++k)
    out.push_back(lo * std::pow(hi / lo, double(k) / double(n - 1)));
  return out;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw SolverError(Kind::io, "cannot read config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SolverError(Kind::invalid_argument,
                      std::string("config parse error: ") + e.what());
  }
  if (!j.is_object())
    throw SolverError(Kind::invalid_argument,
                      "config root must be an object");

  RunConfig rc = default_config();
  for (const auto& [key, val] : j.items()) {
    if (key == "grid")
      apply_grid(val, rc);
    else if (key == "scf")
      apply_scf(val, rc);
    else if (key == "alpha")
      rc.alpha = get_number(val, "alpha");
    else if (key == "momenta") {
      if (!val.is_array())
        throw SolverError(Kind::invalid_argument,
                          "config field momenta must be an array");
      rc.momenta.clear();
      for (const auto& m : val)
        rc.momenta.push_back(get_number(m, "momenta"));
    } else if (key == "out_dir")
      rc.out_dir = get_string(val, "out_dir");
    else if (key == "verbosity")
      rc.verbosity = get_integer(val, "verbosity");
    else
      throw SolverError(Kind::invalid_argument,
                        "unknown config field: " + key);
  }

  validate(rc.scf);
  if (!(rc.alpha > 0.0 && rc.alpha < 0.1))
    throw SolverError(Kind::invalid_argument, "alpha must lie in (0, 0.1)");
  if (rc.verbosity < 0)
    throw SolverError(Kind::invalid_argument,
                      "verbosity must be non-negative");
  return rc;
}

std::string config_hash(const RunConfig& config) {
  std::string dump = config_to_json(config).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_report_json(const RunReport& report, const std::string& path) {
  json j;
  j["version"] = report.version;
  j["config_hash"] = report.config_hash;
  j["converged"] = report.converged;
  j["iterations"] = report.iterations;
  j["final_residual"] = report.final_residual;
  j["grid_points"] = report.grid_points;
  j["x_max"] = report.x_max;
  json scalars;
  for (const ScalarSlot& slot : kScalarSlots)
    scalars[slot.name] = value_to_json(report.*(slot.member));
  j["scalars"] = scalars;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
  finish_out(out, path);
}

RunReport read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw SolverError(Kind::io, "cannot read report file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SolverError(Kind::io,
                      std::string("report parse error: ") + e.what());
  }
  RunReport r;
  try {
    r.version = j.at("version").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.converged = j.at("converged").get<bool>();
    r.iterations = j.at("iterations").get<int>();
    r.final_residual = j.at("final_residual").get<double>();
    r.grid_points = j.at("grid_points").get<int>();
    r.x_max = j.at("x_max").get<double>();
    const json& scalars = j.at("scalars");
    for (const ScalarSlot& slot : kScalarSlots)
      r.*(slot.member) = value_from_json(scalars.at(slot.name));
  } catch (const json::exception& e) {
    throw SolverError(Kind::io,
                      std::string("report schema error: ") + e.what());
  }
  return r;
}

void write_report_text(const RunReport& report, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "self-localized quasi-particle solver, version " << report.version
      << "\n";
  out << "config_hash: " << report.config_hash << "\n";
  out << "converged: " << (report.converged ? "yes" : "no") << "\n";
  out << "iterations: " << report.iterations << "\n";
  out << "final_residual: " << fmt17(report.final_residual) << "\n";
  out << "grid_points: " << report.grid_points << "\n";
  out << "x_max: " << fmt17(report.x_max) << "\n";
  for (const ScalarSlot& slot : kScalarSlots) {
    const ReportValue& v = report.*(slot.member);
    if (v.value)
      out << slot.name << " = " << fmt17(*v.value) << "\n";
    else
      out << slot.name << ": skipped (" << v.skipped_reason << ")\n";
  }
  finish_out(out, path);
}

void write_profiles_csv(const ScfSolution& solution, const std::string& path) {
  if (solution.grid.size() == 0 ||
      solution.state.u.size() != solution.grid.size())
    throw SolverError(Kind::invalid_argument,
                      "solution profile arrays are empty or misaligned");
  std::ofstream out = open_out(path);
  out << "x,u,v,rho,phi0\n";
  for (std::size_t i = 0; i < solution.grid.size(); ++i) {
    double cols[5] = {solution.grid.points[i], solution.state.u[i],
                      solution.state.v[i], solution.rho[i],
                      solution.phi0.phi[i]};
    for (int c = 0; c < 5; ++c) {
      check_finite(cols[c], path);
      out << (c ? "," : "") << fmt17(cols[c]);
    }
    out << "\n";
  }
  finish_out(out, path);
}

void write_figure_wavefunctions(const ScfSolution& solution,
                                const std::string& path) {
  if (!solution.converged)
    throw SolverError(Kind::invalid_argument,
                      "figure output requires a converged solution");
  if (solution.state.u.empty())
    throw SolverError(Kind::invalid_argument,
                      "figure output requires a non-empty solution");
  std::ofstream out = open_out(path);
  out << "# radial spinor components of the converged localized state\n";
  out << "# x is the dimensionless radius: x = 2*|a0|*r/r_e in physical "
         "units\n";
  out << "# u0, v0 are unit normalized: integral of (u0^2 + v0^2) dx = 1\n";
  out << "x,u0,v0\n";
  for (std::size_t i = 0; i < solution.grid.size(); ++i) {
    double cols[3] = {solution.grid.points[i], solution.state.u[i],
                      solution.state.v[i]};
    for (int c = 0; c < 3; ++c) {
      check_finite(cols[c], path);
      out << (c ? "," : "") << fmt17(cols[c]);
    }
    out << "\n";
  }
  finish_out(out, path);
}

void write_figure_potential(const ScfSolution& solution,
                            const std::string& path) {
  if (!solution.converged)
    throw SolverError(Kind::invalid_argument,
                      "figure output requires a converged solution");
  if (solution.phi0.phi.empty())
    throw SolverError(Kind::invalid_argument,
                      "figure output requires a non-empty solution");
  std::ofstream out = open_out(path);
  out << "# unit-source potential profile of the converged density\n";
  out << "# x is the dimensionless radius: x = 2*|a0|*r/r_e in physical "
         "units\n";
  out << "# the interaction term in the radial system is a0*phi0(x); "
         "x*phi0(x) -> 1 at large x\n";
  out << "x,phi0\n";
  for (std::size_t i = 0; i < solution.grid.size(); ++i) {
    check_finite(solution.phi0.phi[i], path);
    out << fmt17(solution.grid.points[i]) << ","
        << fmt17(solution.phi0.phi[i]) << "\n";
  }
  finish_out(out, path);
}

void write_formfactor_csv(std::span<const double> momenta,
                          std::span<const double> values,
                          const std::string& path) {
  if (momenta.size() != values.size())
    throw SolverError(Kind::invalid_argument,
                      "momenta and values must have equal length");
  std::ofstream out = open_out(path);
  out << "# charge form factor of the localized state\n";
  out << "# p is the momentum transfer in units of the electron mass\n";
  out << "p,F\n";
  for (std::size_t i = 0; i < momenta.size(); ++i) {
    check_finite(momenta[i], path);
    check_finite(values[i], path);
    out << fmt17(momenta[i]) << "," << fmt17(values[i]) << "\n";
  }
  finish_out(out, path);
}

void write_dispersion_csv(std::span<const double> momenta_over_E0, double E0,
                          const std::string& path) {
  if (!(E0 > 0.0))
    throw SolverError(Kind::invalid_argument, "E0 must be positive");
  std::ofstream out = open_out(path);
  out << "# spinor dispersion coefficients in the quasi-particle vacuum\n";
  out << "# P and E are in the same units as E0\n";
  out << "branch,P,E,L,K,L1,K1,residual\n";
  for (Branch branch : {Branch::electron, Branch::positron}) {
    const char* name = branch == Branch::electron ? "electron" : "positron";
    for (double ratio : momenta_over_E0) {
      DispersionCoefficients c = coefficients(ratio * E0, E0, branch);
      double cols[7] = {c.P, c.E, c.L, c.K, c.L1, c.K1, residual(c)};
      out << name;
      for (double x : cols) {
        check_finite(x, path);
        out << "," << fmt17(x);
      }
      out << "\n";
    }
  }
  finish_out(out, path);
}

}  // namespace selfloc
