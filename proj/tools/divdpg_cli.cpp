// Command-line driver: convergence studies, exports, and the reference Fortin check.

#include "divdpg/adaptivity.hpp"
#include "divdpg/dpg_core.hpp"
#include "divdpg/fortin.hpp"
#include "divdpg/io.hpp"
#include "divdpg/problems.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace divdpg;

namespace {

struct RunConfig {
  std::string problem = "smooth";
  std::string formulation = "first";
  int p = 0;
  std::string mode = "uniform";
  double theta = 0.75;
  int levels = 6;
  long max_dofs = 0;
  std::string csv;
  std::string vtk_dir;
  std::string dof_csv;
  std::string solver = "direct";
  int threads = 1;
  bool check = false;
};

// Relative output paths are placed under DIVDPG_OUTPUT_DIR when it is set.
fs::path output_path(const std::string& p) {
  fs::path path(p);
  const char* dir = std::getenv("DIVDPG_OUTPUT_DIR");
  if (dir && *dir && path.is_relative()) path = fs::path(dir) / path;
  return path;
}

int run(const RunConfig& cfg) {
  const ProblemSpec problem = cfg.problem == "smooth" ? smooth_problem() : lshape_problem();
  int p = cfg.p;
  if (cfg.formulation == "second" && p != 0) {
    std::cerr << "note: the second-order formulation is lowest order; using p = 0\n";
    p = 0;
  }
  const auto form = make_formulation(cfg.formulation == "first" ? FormulationKind::First : FormulationKind::Second, p);

  AdaptiveConfig ac;
  ac.adaptive = cfg.mode == "adaptive";
  ac.theta = cfg.theta;
  ac.max_levels = cfg.levels;
  ac.max_dofs = cfg.max_dofs;
  ac.solve.threads = cfg.threads;
  ac.solve.solver = cfg.solver == "cg" ? SolverKind::ConjugateGradient : SolverKind::Direct;

  fs::path vtk_dir;
  if (!cfg.vtk_dir.empty()) {
    vtk_dir = output_path(cfg.vtk_dir);
    fs::create_directories(vtk_dir);
  }
  const auto fields = form->fields();
  std::string dofs;  // DOF table of the latest level
  auto on_level = [&](const ConvergenceRecord& rec, const Mesh& mesh, const DofLayout& layout,
                      const DiscreteSolution& sol, const Estimate& est) {
    std::cout << "level " << rec.level << ": elements " << rec.nelems << ", dim " << rec.dim << ", error "
              << rec.err_total << ", eta " << rec.eta << " (" << rec.seconds << " s)\n";
    if (!cfg.dof_csv.empty()) {
      std::ostringstream table;
      write_dof_csv(table, layout, sol.x);
      dofs = table.str();
    }
    if (vtk_dir.empty()) return;
    std::vector<CellField> data;
    for (std::size_t i = 0; i < fields.size(); ++i)
      data.push_back({fields[i].name, field_means(mesh, *form, layout, sol.x, static_cast<int>(i)),
                      fields[i].components == 2});
    std::vector<Vec2> eta(est.local.size());
    for (std::size_t t = 0; t < eta.size(); ++t) eta[t] = Vec2(est.local[t], 0.0);
    data.push_back({"eta", eta, false});
    std::ofstream out(vtk_dir / ("level_" + std::to_string(rec.level) + ".vtk"));
    if (!out) throw Error("cannot write VTK output in " + vtk_dir.string());
    write_vtk(out, mesh, data);
  };

  const AdaptiveResult result = adaptive_loop(problem, *form, ac, on_level);
  const auto& recs = result.records;

  if (!cfg.csv.empty()) {
    const fs::path path = output_path(cfg.csv);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_csv(out, recs);
  }
  if (!cfg.dof_csv.empty()) {
    const fs::path path = output_path(cfg.dof_csv);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << dofs;
  }

  // slopes over the last three levels; adaptive L-shape runs only count dim >= 1e4
  const bool lshape_adaptive = ac.adaptive && problem.domain == DomainKind::LShape;
  const TailSlopes slopes = tail_slopes(recs, 3, lshape_adaptive ? 10000 : 0);
  std::cout << "problem " << problem.name << ", formulation " << form->name() << ", p " << p << ", mode "
            << cfg.mode << "\n";
  std::cout << "fitted slope (last " << slopes.levels << " levels): error " << slopes.error << ", eta "
            << slopes.eta << "\n";

  if (!cfg.check) return 0;
  double expected = -0.5, tol = 0.1;
  if (problem.domain == DomainKind::LShape && !ac.adaptive) expected = -1.0 / 3.0, tol = 0.07;
  bool ok = slopes.levels >= 2 && std::abs(slopes.error - expected) <= tol;
  if (problem.smooth) ok = ok && std::abs(slopes.eta - slopes.error) <= 0.15;
  std::cout << "check: " << (ok ? "PASS" : "FAIL") << " (expected slope " << expected << " +- " << tol << ")\n";
  return ok ? 0 : 2;
}

int fortin() {
  const FortinReport r = build_and_check();
  const FortinSweep s = fortin_sweep(100, 6, 20240611);
  std::cout << "reference Fortin system " << r.size << "x" << r.size << "\n"
            << "  symmetry error      " << r.symmetry_error << "\n"
            << "  sigma_min           " << r.sigma_min << "\n"
            << "  sigma_max           " << r.sigma_max << "\n"
            << "  condition number    " << r.condition << "\n"
            << "  nonsingular         " << (r.nonsingular ? "yes" : "no") << "\n"
            << "  orthogonality (max) " << s.max_orthogonality << " over " << s.samples << " inputs\n"
            << "  idempotence (max)   " << s.max_idempotence << "\n"
            << "  boundedness C       " << s.boundedness << "\n";
  return r.nonsingular && s.max_orthogonality <= 1e-10 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DPG solver for (grad div)^2 u + u = f in two dimensions"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto* run_cmd = app.add_subcommand("run", "convergence study");
  run_cmd->add_option("--problem", cfg.problem, "smooth | lshape")->check(CLI::IsMember({"smooth", "lshape"}));
  run_cmd->add_option("--formulation", cfg.formulation, "first | second")
      ->check(CLI::IsMember({"first", "second"}));
  run_cmd->add_option("--p", cfg.p, "field degree (first-order system)")->check(CLI::Range(0, 4));
  run_cmd->add_option("--mode", cfg.mode, "uniform | adaptive")->check(CLI::IsMember({"uniform", "adaptive"}));
  run_cmd->add_option("--theta", cfg.theta, "Doerfler parameter in (0, 1]")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), 1.0));
  run_cmd->add_option("--levels", cfg.levels, "number of levels")->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-dofs", cfg.max_dofs, "stop once dim reaches this (0: no limit)")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--csv", cfg.csv, "convergence table path");
  run_cmd->add_option("--dof-csv", cfg.dof_csv, "DOF vector of the final level");
  run_cmd->add_option("--vtk-dir", cfg.vtk_dir, "directory for per-level VTK files");
  run_cmd->add_option("--solver", cfg.solver, "direct | cg")->check(CLI::IsMember({"direct", "cg"}));
  run_cmd->add_option("--threads", cfg.threads, "worker threads for element loops")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--check", cfg.check, "exit with status 2 if the fitted slope misses its target");

  auto* fortin_cmd = app.add_subcommand("fortin", "check the reference-element Fortin system");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return run(cfg);
    if (*fortin_cmd) return fortin();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
