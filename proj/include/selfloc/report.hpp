#pragma once

#include <optional>
#include <string>
#include <vector>

#include "selfloc/scf.hpp"
#include "selfloc/version.hpp"

namespace selfloc {

struct RunConfig {
  ScfConfig scf;
  double alpha = kAlphaDefault;        // must lie in (0, 0.1)
  std::vector<double> momenta;         // empty -> built-in table
  std::string out_dir = ".";
  int verbosity = 0;
};

RunConfig default_config();

// JSON file -> RunConfig. Unknown or ill-typed fields throw
// SolverError{invalid_argument} naming the field; missing files throw
// SolverError{io}.
RunConfig load_config(const std::string& path);

// One scalar slot of the report: populated, or skipped with a reason.
struct ReportValue {
  std::optional<double> value;
  std::string skipped_reason;  // non-empty iff value is absent
};

struct RunReport {
  std::string version;
  std::string config_hash;  // hex digest of the canonical config encoding
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  int grid_points = 0;
  double x_max = 0.0;

  ReportValue a0, T, Pi, virial_residual;
  ReportValue alpha0, e0, xi, C_coeff, m0_over_m, Z0, L0_over_m, E0_units_m0;
  ReportValue epsilon1, epsilon2, I_mu, I_1mu, ratio_coefficient, mass_ratio,
      level_difference, orthogonality;
  ReportValue Lambda, log10_lifetime_seconds;
  ReportValue formfactor_L0;
};

std::string config_hash(const RunConfig& config);

// Momentum table used when the config leaves `momenta` empty: p = 0 plus a
// geometric sweep of the high-momentum tail.
std::vector<double> default_momenta();

void write_report_json(const RunReport& report, const std::string& path);
RunReport read_report_json(const std::string& path);
void write_report_text(const RunReport& report, const std::string& path);

// (x, u, v, rho, phi0) table of the converged solution.
void write_profiles_csv(const ScfSolution& solution, const std::string& path);

// Figure tables: (x, u0, v0) and (x, phi0); headers carry the scaling notes.
// Throws SolverError{invalid_argument} on an empty solution.
void write_figure_wavefunctions(const ScfSolution& solution,
                                const std::string& path);
void write_figure_potential(const ScfSolution& solution,
                            const std::string& path);

void write_formfactor_csv(std::span<const double> momenta,
                          std::span<const double> values,
                          const std::string& path);

// (P, E, L, K, L1, K1, residual) rows for both branches.
void write_dispersion_csv(std::span<const double> momenta_over_E0, double E0,
                          const std::string& path);

}  // namespace selfloc
