#include "divdpg/adaptivity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace divdpg {

std::vector<int> doerfler_mark(std::span<const double> eta, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw Error("marking parameter must lie in (0, 1]");
  std::vector<int> order(eta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eta[a] > eta[b]; });
  double total = 0.0;
  for (double e : eta) {
    if (e < 0.0) throw Error("negative local estimator");
    total += e * e;
  }
  std::vector<int> marked;
  if (total == 0.0) return marked;
  // the relative slack keeps exact ties such as 9/16 = theta^2 from rounding away
  const double goal = theta * theta * total * (1.0 - 1e-14);
  double sum = 0.0;
  for (int t : order) {
    if (sum >= goal || eta[t] == 0.0) break;
    marked.push_back(t);
    sum += eta[t] * eta[t];
  }
  return marked;
}

double eoc(double e0, double e1, double dim0, double dim1) {
  return -std::log(e0 / e1) / std::log(dim1 / dim0);
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

AdaptiveResult adaptive_loop(const ProblemSpec& problem, const Formulation& form, const AdaptiveConfig& config,
                             const LevelCallback& on_level) {
  if (config.adaptive && !(config.theta > 0.0 && config.theta <= 1.0))
    throw Error("marking parameter must lie in (0, 1]");
  if (config.max_levels < 1) throw Error("at least one level is required");
  AdaptiveResult result;
  Mesh mesh = initial_mesh(problem, config.unit_square_n);
  int w_index = -1;
  const auto fields = form.fields();
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i].quantity == Quantity::GradDivU) w_index = static_cast<int>(i);

  for (int level = 0; level < config.max_levels; ++level) {
    const auto start = std::chrono::steady_clock::now();
    const DofLayout layout = form.layout(mesh);
    const Vector bc = project_boundary_data(mesh, layout, form, problem);
    const DiscreteSolution sol = solve_dpg(mesh, form, layout, problem.f, bc, config.solve);
    const Estimate est = estimate(mesh, form, layout, problem.f, sol.x, config.solve);

    ConvergenceRecord rec;
    rec.level = level;
    rec.nelems = mesh.num_triangles();
    rec.dim = sol.dim;
    rec.errors = exact_errors(mesh, layout, form, sol.x, problem);
    rec.err_u = rec.errors.front();
    rec.err_w = w_index >= 0 ? rec.errors[w_index] : 0.0;
    double sum = 0.0;
    for (double e : rec.errors) sum += e * e;
    rec.err_total = std::sqrt(sum);
    rec.eta = est.total;
    if (!result.records.empty()) {
      const auto& prev = result.records.back();
      rec.eoc_u = eoc(prev.err_total, rec.err_total, prev.dim, rec.dim);
      rec.eoc_eta = eoc(prev.eta, rec.eta, prev.dim, rec.dim);
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.records.push_back(rec);
    if (on_level) on_level(rec, mesh, layout, sol, est);

    const bool last = level + 1 == config.max_levels || (config.max_dofs > 0 && rec.dim >= config.max_dofs);
    if (last) break;
    if (config.adaptive) {
      const auto marked = doerfler_mark(est.local, config.theta);
      mesh = refine(mesh, marked);
    } else {
      mesh = refine_uniform(refine_uniform(mesh));
    }
  }
  result.final_mesh = mesh;
  return result;
}

TailSlopes tail_slopes(const std::vector<ConvergenceRecord>& records, int count, int min_dim) {
  std::vector<double> dim, err, eta;
  for (const auto& r : records)
    if (r.dim >= min_dim) {
      dim.push_back(r.dim);
      err.push_back(r.err_total);
      eta.push_back(r.eta);
    }
  const std::size_t skip = dim.size() > static_cast<std::size_t>(count) ? dim.size() - count : 0;
  TailSlopes out;
  out.levels = static_cast<int>(dim.size() - skip);
  if (out.levels < 2) {
    out.error = out.eta = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  auto tail = [&](const std::vector<double>& v) { return std::span<const double>(v).subspan(skip); };
  out.error = fit_loglog_slope(tail(dim), tail(err));
  out.eta = fit_loglog_slope(tail(dim), tail(eta));
  return out;
}

}  // namespace divdpg
