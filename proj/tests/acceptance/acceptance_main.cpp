// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "../support.hpp"

#include "divdpg/adaptivity.hpp"
#include "divdpg/fortin.hpp"
#include "divdpg/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

using namespace divdpg;
using namespace divdpg::test;

namespace {

int failures = 0;
long factorizations = 0;  // successful Cholesky factorizations of global matrices

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  " << what << "  [" << detail << "]"
            << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

struct Study {
  std::vector<ConvergenceRecord> records;
  Mesh mesh;
  double seconds = 0.0;
};

Study study(const ProblemSpec& problem, FormulationKind kind, bool adaptive, int levels, long max_dofs = 0) {
  const auto form = make_formulation(kind, 0);
  AdaptiveConfig cfg;
  cfg.adaptive = adaptive;
  cfg.max_levels = levels;
  cfg.max_dofs = max_dofs;
  const auto start = std::chrono::steady_clock::now();
  AdaptiveResult r = adaptive_loop(problem, *form, cfg, [](const ConvergenceRecord&, const Mesh&, const DofLayout&,
                                                            const DiscreteSolution& sol, const Estimate&) {
    if (sol.factor_nonzeros > 0) ++factorizations;
  });
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(r.records), std::move(r.final_mesh), seconds};
}

const char* name(FormulationKind k) { return k == FormulationKind::First ? "first" : "second"; }

// Runs a criterion body; an exception counts as failure.
template <class F>
void guarded(int id, const std::string& what, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, what, std::string("exception: ") + e.what());
  }
}

void smooth_uniform(int id, FormulationKind kind) {
  guarded(id, std::string("smooth, ") + name(kind) + "-order, uniform: slope -0.50 +- 0.10", [&] {
    const Study s = study(smooth_problem(), kind, false, 6);
    const TailSlopes t = tail_slopes(s.records);
    const bool ok = std::abs(t.error + 0.5) <= 0.1 && std::abs(t.eta - t.error) <= 0.15 && s.seconds <= 120.0;
    report(id, ok, std::string("smooth, ") + name(kind) + "-order, uniform: slope -0.50 +- 0.10",
           "error slope " + fmt(t.error) + ", eta slope " + fmt(t.eta) + ", final dim " +
               std::to_string(s.records.back().dim) + ", " + fmt(s.seconds) + " s");
  });
}

void criterion3() {
  const std::string what = "L-shape, quasi-uniform: slope -0.333 +- 0.07 (both formulations)";
  guarded(3, what, [&] {
    bool ok = true;
    std::string detail;
    for (auto kind : {FormulationKind::First, FormulationKind::Second}) {
      const Study s = study(lshape_problem(), kind, false, 6);
      const TailSlopes t = tail_slopes(s.records);
      ok = ok && std::abs(t.error + 1.0 / 3.0) <= 0.07;
      detail += std::string(detail.empty() ? "" : "; ") + name(kind) + " " + fmt(t.error);
    }
    report(3, ok, what, detail);
  });
}

void criterion4() {
  const std::string what = "L-shape, adaptive theta = 3/4: slope -0.50 +- 0.10 for dim >= 1e4, refinement at the corner";
  guarded(4, what, [&] {
    bool ok = true;
    std::string detail;
    for (auto kind : {FormulationKind::First, FormulationKind::Second}) {
      const Study s = study(lshape_problem(), kind, true, 80, 60000);
      const TailSlopes t = tail_slopes(s.records, 3, 10000);
      const double hmin = s.mesh.min_diameter();
      double dist = INFINITY;
      for (int e = 0; e < s.mesh.num_triangles(); ++e)
        if (s.mesh.geometry(e).diameter <= hmin * (1 + 1e-12))
          for (const Vec2& v : s.mesh.geometry(e).vertices) dist = std::min(dist, v.norm());
      ok = ok && t.levels >= 2 && std::abs(t.error + 0.5) <= 0.1 && dist <= 2 * hmin;
      detail += std::string(detail.empty() ? "" : "; ") + name(kind) + " slope " + fmt(t.error) + " over " +
                std::to_string(t.levels) + " levels up to dim " + std::to_string(s.records.back().dim) +
                ", h_min " + fmt(hmin) + " at distance " + fmt(dist);
    }
    report(4, ok, what, detail);
  });
}

void criterion5() {
  const std::string what = "assembled solution equals the dense least-squares minimizer (<= 4 elements), 1e-8";
  guarded(5, what, [&] {
    double worst = 0.0;
    const Mesh one = make_unit_square(1);
    const std::vector<int> both = {0, 1};
    const Mesh meshes[] = {one, refine(one, both), make_lshape().num_triangles() <= 4 ? make_lshape() : one};
    for (auto kind : {FormulationKind::First, FormulationKind::Second})
      for (const Mesh& m : meshes) {
        const auto form = make_formulation(kind, 0);
        const ProblemSpec prob = smooth_problem();
        const DofLayout layout = form->layout(m);
        const Vector bc = project_boundary_data(m, layout, *form, prob);
        const DiscreteSolution sol = solve_dpg(m, *form, layout, prob.f, bc);
        const DenseOracle o = dense_oracle(m, *form, layout, prob.f, bc);
        worst = std::max(worst, (sol.x - o.x).norm() / o.x.norm());
      }
    report(5, worst <= 1e-8, what, "max relative difference " + fmt(worst));
  });
}

void criterion6() {
  const std::string what = "polynomial solution in the trial space reproduced to 1e-10 with eta <= 1e-10";
  guarded(6, what, [&] {
    // u linear for the first-order system at p = 1, u constant for the second-order system at p = 0
    PolyVec lin{Polynomial(1), Polynomial(1)};
    lin.x.set_coeff(0, 0, 0.3);
    lin.x.set_coeff(1, 0, -1.2);
    lin.x.set_coeff(0, 1, 0.5);
    lin.y.set_coeff(0, 0, 2.0);
    lin.y.set_coeff(1, 0, 0.7);
    lin.y.set_coeff(0, 1, 0.4);
    const PolyVec cst{Polynomial::constant(1.5), Polynomial::constant(-0.25)};
    double err = 0.0, eta = 0.0;
    for (auto [kind, p, u] : {std::tuple{FormulationKind::First, 1, lin}, std::tuple{FormulationKind::Second, 0, cst}})
      for (const Mesh& m : {make_unit_square(2), refine_uniform(make_lshape())}) {
        const auto form = make_formulation(kind, p);
        const ProblemSpec prob = polynomial_problem(u);
        const DofLayout layout = form->layout(m);
        const Vector bc = project_boundary_data(m, layout, *form, prob);
        const DiscreteSolution sol = solve_dpg(m, *form, layout, prob.f, bc);
        const Vector exact = interpolate_exact(m, layout, *form, prob);
        err = std::max(err, (sol.x - exact).cwiseAbs().maxCoeff() / std::max(1.0, exact.cwiseAbs().maxCoeff()));
        eta = std::max(eta, estimate(m, *form, layout, prob.f, sol.x).total);
      }
    report(6, err <= 1e-10 && eta <= 1e-10, what, "max DOF error " + fmt(err) + ", max eta " + fmt(eta));
  });
}

void criterion7() {
  const std::string what = "zero data and homogeneous boundary data give the zero solution, 1e-12";
  guarded(7, what, [&] {
    double worst = 0.0;
    for (auto kind : {FormulationKind::First, FormulationKind::Second})
      for (const Mesh& m : {make_unit_square(4), refine_uniform(make_lshape())}) {
        const auto form = make_formulation(kind, 0);
        const DofLayout layout = form->layout(m);
        const ProblemSpec zero = zero_problem();
        const DiscreteSolution sol =
            solve_dpg(m, *form, layout, zero.f, project_boundary_data(m, layout, *form, zero));
        worst = std::max(worst, sol.x.cwiseAbs().maxCoeff());
      }
    report(7, worst <= 1e-12, what, "max |x| " + fmt(worst));
  });
}

void criterion8() {
  const std::string what = "reference Fortin system nonsingular, orthogonality <= 1e-10 on 100 random inputs";
  guarded(8, what, [&] {
    const FortinReport r = build_and_check();
    const FortinSweep s = fortin_sweep(100, 6, 20240611);
    const bool ok = r.size == 28 && r.sigma_min > 1e-10 * r.sigma_max && s.samples == 100 &&
                    s.max_orthogonality <= 1e-10;
    report(8, ok, what,
           "28x28, sigma_min " + fmt(r.sigma_min) + ", sigma_max " + fmt(r.sigma_max) + ", orthogonality " +
               fmt(s.max_orthogonality) + ", observed bound " + fmt(s.boundedness));
  });
}

void criterion9() {
  const std::string what = "global matrices SPD, b-consistency <= 1e-11 (test dual norm), interior trace cancellation <= 1e-11";
  guarded(9, what, [&] {
    Mesh graded = make_unit_square(2);
    for (int i = 0; i < 3; ++i) {
      std::vector<int> marked;
      for (int t = 0; t < graded.num_triangles(); ++t)
        if (graded.geometry(t).centroid.x() < 0.4) marked.push_back(t);
      graded = refine(graded, marked);
    }
    std::mt19937_64 rng(2718);
    double consistency = 0.0, cancellation = 0.0;
    for (int p : {0, 2, 4}) {
      const FirstOrderForm first(p);
      const SecondOrderForm second(p);
      for (const Formulation* form : {static_cast<const Formulation*>(&first), static_cast<const Formulation*>(&second)}) {
        const DofLayout layout = form->layout(graded);
        const ProblemSpec prob = polynomial_problem(random_polyvec(p, rng));
        consistency = std::max(consistency, max_local_residual(graded, *form, layout, prob.f,
                                                               interpolate_exact(graded, layout, *form, prob)));
        // SPD check on this mesh
        const GlobalSystem sys =
            assemble_condensed_system(graded, *form, layout, prob.f, Vector::Zero(layout.num_dofs()));
        SparseSpdSolver factor(sys.matrix);
        ++factorizations;
      }
      const PolyVec v1 = random_polyvec(p + 2, rng), v3 = random_polyvec(p + 2, rng);
      const Polynomial v2 = Polynomial::random(p + 3, rng), v4 = Polynomial::random(p + 3, rng);
      const std::vector<VectorField> tests = {[&](const Vec2& x) { return v1(x); },
                                              [&](const Vec2& x) { return Vec2(v2(x), 0); },
                                              [&](const Vec2& x) { return v3(x); },
                                              [&](const Vec2& x) { return Vec2(v4(x), 0); }};
      const DofLayout l1 = first.layout(graded);
      const Vector pair1 = trace_pairing(graded, first, l1, [&](int t) {
        return first_order_test_coefficients(first, graded, t, tests);
      });
      for (int d = 0; d < l1.num_dofs(); ++d)
        if (d >= graded.num_triangles() * l1.field_dofs_per_element() && interior_trace_dof(graded, l1, d))
          cancellation = std::max(cancellation, std::abs(pair1[d]));
      const PolyVec v = random_polyvec(p + 3, rng), tau = random_polyvec(p + 3, rng);
      const DofLayout l2 = second.layout(graded);
      const Vector pair2 = trace_pairing(graded, second, l2, [&](int t) {
        return second_order_test_coefficients(second, graded, t, [&](const Vec2& x) { return v(x); },
                                              [&](const Vec2& x) { return tau(x); });
      });
      for (int d = 0; d < l2.num_dofs(); ++d)
        if (d >= graded.num_triangles() * l2.field_dofs_per_element() && interior_trace_dof(graded, l2, d))
          cancellation = std::max(cancellation, std::abs(pair2[d]));
    }
    const bool ok = consistency <= 1e-11 && cancellation <= 1e-11 && factorizations > 0;
    report(9, ok, what,
           std::to_string(factorizations) + " Cholesky factorizations succeeded, consistency " + fmt(consistency) +
               ", cancellation " + fmt(cancellation));
  });
}

void criterion10() {
  const std::string what = "identical CSV across repeated runs and thread counts";
  guarded(10, what, [&] {
    bool ok = true;
    int runs = 0;
    for (auto kind : {FormulationKind::First, FormulationKind::Second})
      for (bool adaptive : {false, true}) {
        std::string reference;
        for (int threads : {1, 1, 2, 8}) {
          const auto form = make_formulation(kind, 0);
          AdaptiveConfig cfg;
          cfg.adaptive = adaptive;
          cfg.max_levels = adaptive ? 10 : 4;
          cfg.solve.threads = threads;
          std::ostringstream csv;
          write_csv(csv, adaptive_loop(lshape_problem(), *form, cfg).records);
          if (reference.empty()) reference = csv.str();
          ok = ok && csv.str() == reference;
          ++runs;
        }
      }
    report(10, ok, what, std::to_string(runs) + " runs with 1, 1, 2 and 8 threads");
  });
}

}  // namespace

int main() {
  smooth_uniform(1, FormulationKind::First);
  smooth_uniform(2, FormulationKind::Second);
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
