#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selfloc/dispersion.hpp"
#include "selfloc/muon.hpp"
#include "selfloc/observables.hpp"
#include "selfloc/report.hpp"
#include "selfloc/scf.hpp"
#include "selfloc/version.hpp"

namespace fs = std::filesystem;
using namespace selfloc;

namespace {

struct Stages {
  bool muon = false;
  bool dispersion = false;
  bool formfactor = false;
  bool overlap = false;
};

void mark_skipped(ReportValue& v, const std::string& reason) {
  v.value.reset();
  v.skipped_reason = reason;
}

void skip_derived(RunReport& rep, const std::string& reason) {
  for (ReportValue* v :
       {&rep.T, &rep.Pi, &rep.virial_residual, &rep.alpha0, &rep.e0, &rep.xi,
        &rep.C_coeff, &rep.m0_over_m, &rep.Z0, &rep.L0_over_m,
        &rep.E0_units_m0})
    mark_skipped(*v, reason);
}

void skip_muon(RunReport& rep, const std::string& reason) {
  for (ReportValue* v :
       {&rep.epsilon1, &rep.epsilon2, &rep.I_mu, &rep.I_1mu,
        &rep.ratio_coefficient, &rep.mass_ratio, &rep.level_difference,
        &rep.orthogonality})
    mark_skipped(*v, reason);
}

void skip_overlap(RunReport& rep, const std::string& reason) {
  mark_skipped(rep.Lambda, reason);
  mark_skipped(rep.log10_lifetime_seconds, reason);
}

int run(const RunConfig& rc, const Stages& st, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir))
    throw SolverError(SolverError::Kind::io,
                      "cannot create output directory: " + out_dir);
  auto path = [&](const char* name) { return out_dir + "/" + name; };

  RunReport rep;
  rep.version = kVersion;
  rep.config_hash = config_hash(rc);
  rep.grid_points = int(rc.scf.n_points);
  rep.x_max = rc.scf.x_max;

  ScfSolution sol = scf_solve(rc.scf);
  rep.converged = sol.converged;
  rep.iterations = sol.iterations;
  rep.final_residual =
      sol.residual_history.empty() ? 0.0 : sol.residual_history.back();
  rep.a0.value = sol.a;

  if (!sol.converged) {
    skip_derived(rep, "solver did not converge");
    skip_muon(rep, "solver did not converge");
    skip_overlap(rep, "solver did not converge");
    mark_skipped(rep.formfactor_L0, "solver did not converge");
    write_report_json(rep, path("report.json"));
    write_report_text(rep, path("report.txt"));
    std::cout << "did not converge within " << rep.iterations
              << " iterations; report written to " << path("report.json")
              << "\n";
    return 2;
  }

  EnergyReport er = energy_report(sol, rc.alpha);
  rep.T.value = er.T;
  rep.Pi.value = er.Pi;
  rep.virial_residual.value = er.virial_residual;
  rep.E0_units_m0.value = er.E0_units_m0;
  PhysicalConstants pc = derive_constants(sol.a, er.T, rc.alpha);
  rep.alpha0.value = pc.alpha0;
  rep.e0.value = pc.e0;
  rep.xi.value = pc.xi;
  rep.C_coeff.value = pc.C;
  rep.m0_over_m.value = pc.m0_over_m;
  rep.Z0.value = pc.Z0;
  rep.L0_over_m.value = pc.L0_over_m;

  write_profiles_csv(sol, path("profiles.csv"));
  write_figure_wavefunctions(sol, path("fig_wavefunctions.csv"));
  write_figure_potential(sol, path("fig_potential.csv"));

  std::optional<MuonResult> mu;
  if (st.muon || st.overlap) {
    mu = solve_muon_adiabatic(sol, pc);
    rep.epsilon1.value = mu->epsilon1;
    rep.epsilon2.value = mu->epsilon2;
    rep.I_mu.value = mu->I_mu;
    rep.I_1mu.value = mu->I_1mu;
    rep.ratio_coefficient.value = mu->ratio_coefficient;
    rep.mass_ratio.value = mu->mass_ratio;
    rep.level_difference.value = mu->level_difference;
    rep.orthogonality.value = mu->orthogonality;
  } else {
    skip_muon(rep, "muon stage not requested");
  }

  if (st.dispersion) {
    double e0_units_m = er.E0_units_m0 * pc.m0_over_m;
    std::vector<double> ratios = {0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0};
    write_dispersion_csv(ratios, e0_units_m, path("dispersion.csv"));
  }

  if (st.formfactor) {
    std::vector<double> momenta =
        rc.momenta.empty() ? default_momenta() : rc.momenta;
    FormFactorTable table = form_factor(sol, momenta, rc.alpha);
    write_formfactor_csv(table.momenta, table.values, path("formfactor.csv"));
    rep.formfactor_L0.value = table.L0_fit;
  } else {
    mark_skipped(rep.formfactor_L0, "form-factor stage not requested");
  }

  if (st.overlap) {
    const std::size_t n = sol.grid.size();
    std::vector<double> rho_mu(n);
    for (std::size_t i = 0; i < n; ++i)
      rho_mu[i] = mu->excited.u[i] * mu->excited.u[i] +
                  mu->excited.v[i] * mu->excited.v[i];
    PotentialProfile phi0_mu = compute_potential(sol.grid, rho_mu);
    std::vector<double> phi_e(n), phi_m(n);
    for (std::size_t i = 0; i < n; ++i) {
      phi_e[i] = sol.a * sol.phi0.phi[i];
      phi_m[i] = sol.a * phi0_mu.phi[i];
    }
    OverlapResult ov = overlap_lambda(sol.grid, phi_e, phi_m, pc);
    rep.Lambda.value = ov.Lambda;
    rep.log10_lifetime_seconds.value = ov.log10_lifetime_seconds;
  } else {
    skip_overlap(rep, "overlap stage not requested");
  }

  write_report_json(rep, path("report.json"));
  write_report_text(rep, path("report.txt"));
  std::cout << "converged in " << rep.iterations << " iterations: a0 = "
            << sol.a << "; report written to " << path("report.json") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-localized quasi-particle solver"};
  app.require_subcommand(1);
  app.fallthrough();  // allow global options after the subcommand name

  std::string config_path, out_flag;
  int grid_points = 0;
  double x_max = 0.0;
  int verbose = 0;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_flag, "output directory");
  app.add_option("--grid-points", grid_points, "override the grid point count");
  app.add_option("--x-max", x_max, "override the outer radius");
  app.add_flag("-v,--verbose", verbose, "increase verbosity");

  CLI::App* sub_solve =
      app.add_subcommand("solve", "self-consistent solve and profile tables");
  CLI::App* sub_muon =
      app.add_subcommand("muon", "solve plus heavy-level scalars");
  CLI::App* sub_disp =
      app.add_subcommand("dispersion", "solve plus dispersion table");
  CLI::App* sub_ff =
      app.add_subcommand("formfactor", "solve plus charge form factor");
  CLI::App* sub_ov =
      app.add_subcommand("overlap", "solve plus decay-suppression overlap");
  CLI::App* sub_all = app.add_subcommand("all", "the full pipeline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig rc =
        config_path.empty() ? default_config() : load_config(config_path);
    if (grid_points > 0) rc.scf.n_points = std::size_t(grid_points);
    if (x_max > 0.0) rc.scf.x_max = x_max;
    rc.verbosity += verbose;
    rc.scf.verbose = rc.verbosity > 0;
    validate(rc.scf);

    std::string out_dir = rc.out_dir;
    if (const char* env = std::getenv("SELFLOC_OUTPUT_DIR"); env && *env)
      out_dir = env;
    if (!out_flag.empty()) out_dir = out_flag;
    if (out_dir.empty()) out_dir = ".";

    Stages st;
    st.muon = sub_muon->parsed() || sub_all->parsed();
    st.dispersion = sub_disp->parsed() || sub_all->parsed();
    st.formfactor = sub_ff->parsed() || sub_all->parsed();
    st.overlap = sub_ov->parsed() || sub_all->parsed();
    (void)sub_solve;
    return run(rc, st, out_dir);
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind) {
      case SolverError::Kind::invalid_argument:
      case SolverError::Kind::not_implemented:
        return 1;
      case SolverError::Kind::io:
        return 3;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
