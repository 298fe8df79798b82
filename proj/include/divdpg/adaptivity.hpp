#pragma once

#include "divdpg/dpg_core.hpp"
#include "divdpg/problems.hpp"

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace divdpg {

struct AdaptiveConfig {
  double theta = 0.75;
  int max_levels = 6;
  long max_dofs = 0;  // stop after the first level with dim >= max_dofs; 0 disables
  bool adaptive = false;
  int unit_square_n = 2;
  SolveOptions solve;
};

/// One refinement level of a convergence study.
struct ConvergenceRecord {
  int level = 0;
  int nelems = 0;
  int dim = 0;
  std::vector<double> errors;  // per field variable
  double err_u = 0.0;          // first field (u or u1)
  double err_w = 0.0;          // error of w = -grad div u (u3 for the first-order system)
  double err_total = 0.0;      // sqrt of the sum of squared field errors
  double eta = 0.0;
  double eoc_u = std::numeric_limits<double>::quiet_NaN();
  double eoc_eta = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

struct AdaptiveResult {
  std::vector<ConvergenceRecord> records;
  Mesh final_mesh;
};

/// Minimal set M, greedy by descending eta_T (ties: lower index first), with
/// sum_M eta_T^2 >= theta^2 sum eta_T^2.
std::vector<int> doerfler_mark(std::span<const double> eta, double theta);

/// -log(e_k/e_{k+1}) / log(dim_{k+1}/dim_k).
double eoc(double e0, double e1, double dim0, double dim1);

/// Least-squares slope of log y against log x.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct TailSlopes {
  int levels = 0;  // levels used in the fit
  double error = 0.0;
  double eta = 0.0;
};

/// Log-log slopes of err_total and eta against dim over the last `count`
/// levels with dim >= min_dim.
TailSlopes tail_slopes(const std::vector<ConvergenceRecord>& records, int count = 3, int min_dim = 0);

using LevelCallback = std::function<void(const ConvergenceRecord&, const Mesh&, const DofLayout&,
                                         const DiscreteSolution&, const Estimate&)>;

/// solve, estimate, mark, refine. Uniform mode bisects every element twice
/// per level so h halves.
AdaptiveResult adaptive_loop(const ProblemSpec& problem, const Formulation& form, const AdaptiveConfig& config,
                             const LevelCallback& on_level = {});

}  // namespace divdpg
