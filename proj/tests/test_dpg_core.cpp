#include "support.hpp"

#include "divdpg/adaptivity.hpp"
#include "divdpg/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace divdpg;
using namespace divdpg::test;

namespace {

std::unique_ptr<Formulation> form_of(FormulationKind k, int p = 0) { return make_formulation(k, p); }

Mesh four_elements() {
  const Mesh m = make_unit_square(1);
  const std::vector<int> both = {0, 1};
  return refine(m, both);
}

struct Solved {
  DofLayout layout;
  Vector bc;
  DiscreteSolution sol;
};

Solved solve(const Mesh& m, const Formulation& form, const ProblemSpec& prob, const SolveOptions& opt = {}) {
  DofLayout layout = form.layout(m);
  Vector bc = project_boundary_data(m, layout, form, prob);
  DiscreteSolution sol = solve_dpg(m, form, layout, prob.f, bc, opt);
  return {std::move(layout), std::move(bc), std::move(sol)};
}

double rel_diff(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

}  // namespace

TEST_SUITE("dpg_core") {
  TEST_CASE("local Schur complement") {
    for (auto kind : {FormulationKind::First, FormulationKind::Second}) {
      const auto form = form_of(kind);
      const Mesh m = make_unit_square(2);
      const DofLayout layout = form->layout(m);
      const LocalSystem zero = form->local_system(m, layout, 3, {});
      const auto [a0, f0] = schur_local(zero, 3);
      CHECK(f0.norm() == 0.0);
      const LocalSystem ls = form->local_system(m, layout, 3, smooth_problem().f);
      const auto [a, f] = schur_local(ls, 3);
      CHECK((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * a.cwiseAbs().maxCoeff());
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * eig.eigenvalues().maxCoeff());
      // direct formula B^T G^{-1} B
      const Matrix direct = ls.b.transpose() * ls.gram.llt().solve(ls.b);
      CHECK((a - direct).cwiseAbs().maxCoeff() <= 1e-10 * direct.cwiseAbs().maxCoeff());
      CHECK((f - ls.b.transpose() * ls.gram.llt().solve(ls.load)).norm() <= 1e-10 * f.norm());

      // eliminating the fields gives the Schur complement of A on the traces
      const int nf = layout.field_dofs_per_element();
      const int nt = static_cast<int>(a.rows()) - nf;
      const CondensedLocal c = condense_local(ls, nf, 3);
      const Matrix aff = a.topLeftCorner(nf, nf), aft = a.topRightCorner(nf, nt);
      const Matrix s = a.bottomRightCorner(nt, nt) - aft.transpose() * aff.llt().solve(aft);
      const Vector fs = f.tail(nt) - aft.transpose() * aff.llt().solve(f.head(nf));
      const Matrix cs = c.s.cast<double>();
      CHECK((cs - s).cwiseAbs().maxCoeff() <= 1e-9 * s.cwiseAbs().maxCoeff());
      CHECK((c.f.cast<double>() - fs).norm() <= 1e-9 * fs.norm());
      CHECK((c.rw.transpose() * c.rw - cs).cwiseAbs().maxCoeff() <= 1e-12 * cs.cwiseAbs().maxCoeff());
    }
  }

  TEST_CASE("solution equals the dense weighted least-squares minimizer") {
    for (auto kind : {FormulationKind::First, FormulationKind::Second})
      for (const Mesh& m : {make_unit_square(1), four_elements()}) {
        const auto form = form_of(kind);
        const ProblemSpec prob = smooth_problem();
        const Solved s = solve(m, *form, prob);
        const DenseOracle oracle = dense_oracle(m, *form, s.layout, prob.f, s.bc);
        INFO(form->name() << " on " << m.num_triangles() << " elements");
        CHECK(rel_diff(s.sol.x, oracle.x) <= 1e-8);
        CHECK(estimate(m, *form, s.layout, prob.f, s.sol.x).total ==
              doctest::Approx(oracle.residual).epsilon(1e-10));
        // the uncondensed path agrees as well
        SolveOptions full;
        full.condense_fields = false;
        CHECK(rel_diff(solve(m, *form, prob, full).sol.x, oracle.x) <= 1e-8);
      }
  }

  TEST_CASE("assembled system matches a dense solve") {
    for (auto kind : {FormulationKind::First, FormulationKind::Second}) {
      const auto form = form_of(kind);
      const Mesh m = make_unit_square(2);
      const ProblemSpec prob = smooth_problem();
      const DofLayout layout = form->layout(m);
      const Vector bc = project_boundary_data(m, layout, *form, prob);
      const GlobalSystem sys = assemble_system(m, *form, layout, prob.f, bc);
      const Matrix dense = sys.matrix.to_dense();
      CHECK((dense - dense.transpose()).norm() == 0.0);
      const Eigen::LLT<Matrix> llt(dense);
      REQUIRE(llt.info() == Eigen::Success);
      const Vector xd = llt.solve(Vector(sys.rhs.cast<double>()));
      const SolveReport rep = sparse_spd_solve(sys.matrix, sys.rhs);
      CHECK(rel_diff(rep.x, xd) <= 1e-10);
      const SolveReport cg = sparse_spd_solve(sys.matrix, sys.rhs, SolverKind::ConjugateGradient, 1e-14);
      CHECK(rel_diff(cg.x, rep.x) <= 1e-8);
    }
  }

  TEST_CASE("CG and direct solves agree") {
    for (auto kind : {FormulationKind::First, FormulationKind::Second}) {
      const auto form = form_of(kind);
      const Mesh m = make_unit_square(4);
      SolveOptions cg;
      cg.solver = SolverKind::ConjugateGradient;
      const Solved a = solve(m, *form, smooth_problem());
      const Solved b = solve(m, *form, smooth_problem(), cg);
      CHECK(rel_diff(b.sol.x, a.sol.x) <= 1e-8);
      CHECK(b.sol.iterations > 0);
    }
  }

  TEST_CASE("zero data gives the zero solution") {
    for (auto kind : {FormulationKind::First, FormulationKind::Second}) {
      const auto form = form_of(kind);
      const Solved s = solve(refine_uniform(make_lshape()), *form, zero_problem());
      CHECK(s.sol.x.cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("exact recovery of discrete solutions") {
    // first-order, p = 1: u1 linear, u2 = div u1 constant, u3 = u4 = 0
    PolyVec lin{Polynomial(1), Polynomial(1)};
    lin.x.set_coeff(0, 0, 0.3);
    lin.x.set_coeff(1, 0, -1.2);
    lin.x.set_coeff(0, 1, 0.5);
    lin.y.set_coeff(0, 0, 2.0);
    lin.y.set_coeff(1, 0, 0.7);
    lin.y.set_coeff(0, 1, 0.4);
    const PolyVec cst{Polynomial::constant(1.5), Polynomial::constant(-0.25)};
    struct Case {
      FormulationKind kind;
      int p;
      PolyVec u;
    };
    for (const Case& c : {Case{FormulationKind::First, 1, lin}, Case{FormulationKind::First, 0, cst},
                          Case{FormulationKind::Second, 0, cst}, Case{FormulationKind::Second, 1, lin}}) {
      const auto form = form_of(c.kind, c.p);
      for (const Mesh& m : {make_unit_square(2), four_elements(), refine_uniform(make_lshape())}) {
        const ProblemSpec prob = polynomial_problem(c.u);
        const Solved s = solve(m, *form, prob);
        const Vector exact = interpolate_exact(m, s.layout, *form, prob);
        INFO(form->name() << " p = " << c.p);
        CHECK((s.sol.x - exact).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, exact.cwiseAbs().maxCoeff()));
        CHECK(estimate(m, *form, s.layout, prob.f, s.sol.x).total <= 1e-10);
        for (double e : exact_errors(m, s.layout, *form, s.sol.x, prob)) CHECK(e <= 1e-11);
      }
    }
  }

  TEST_CASE("estimator is positive on the smooth example and decreases") {
    for (auto kind : {FormulationKind::First, FormulationKind::Second}) {
      const auto form = form_of(kind);
      Mesh m = make_unit_square(4);
      double previous = INFINITY;
      for (int level = 0; level < 3; ++level) {
        const Solved s = solve(m, *form, smooth_problem());
        const double eta = estimate(m, *form, s.layout, smooth_problem().f, s.sol.x).total;
        CHECK(std::isfinite(eta));
        CHECK(eta > 0);
        CHECK(eta < previous);
        previous = eta;
        m = refine_uniform(refine_uniform(m));
      }
    }
  }

  TEST_CASE("global matrix is SPD on every tested mesh") {
    std::vector<Mesh> meshes = {make_unit_square(1), make_unit_square(3), make_lshape(), refine_uniform(make_lshape())};
    Mesh graded = make_lshape();
    for (int i = 0; i < 8; ++i) {
      std::vector<int> marked;
      for (int t = 0; t < graded.num_triangles(); ++t)
        if (graded.geometry(t).centroid.norm() < 0.1) marked.push_back(t);
      graded = refine(graded, marked);
    }
    meshes.push_back(graded);
    for (auto kind : {FormulationKind::First, FormulationKind::Second})
      for (const Mesh& m : meshes) {
        const auto form = form_of(kind);
        const DofLayout layout = form->layout(m);
        const Vector bc = Vector::Zero(layout.num_dofs());
        for (bool condensed : {false, true}) {
          const GlobalSystem sys = condensed ? assemble_condensed_system(m, *form, layout, {}, bc)
                                             : assemble_system(m, *form, layout, {}, bc);
          CHECK_NOTHROW(SparseSpdSolver(sys.matrix));
        }
      }
  }

  TEST_CASE("results do not depend on the thread count") {
    for (auto kind : {FormulationKind::First, FormulationKind::Second}) {
      const auto form = form_of(kind);
      Mesh m = make_lshape();
      for (int i = 0; i < 4; ++i) m = refine_uniform(m);
      SolveOptions one, many;
      many.threads = 4;
      const Solved a = solve(m, *form, lshape_problem(), one);
      const Solved b = solve(m, *form, lshape_problem(), many);
      CHECK(a.sol.x == b.sol.x);
      const Estimate ea = estimate(m, *form, a.layout, lshape_problem().f, a.sol.x, one);
      const Estimate eb = estimate(m, *form, b.layout, lshape_problem().f, b.sol.x, many);
      CHECK(ea.local == eb.local);
      CHECK(ea.total == eb.total);
    }
  }

  TEST_CASE("field evaluation") {
    const auto form = form_of(FormulationKind::First, 1);
    const Mesh m = make_unit_square(2);
    const PolyVec u{Polynomial::monomial(1, 0, 2.0), Polynomial::constant(1.0)};
    const ProblemSpec prob = polynomial_problem(u);
    const DofLayout layout = form->layout(m);
    const Vector x = interpolate_exact(m, layout, *form, prob);
    const Vec2 p(0.3, 0.6);
    int t = 0;
    for (; t < m.num_triangles(); ++t) {
      const auto g = m.geometry(t);
      const Vec2 l = g.jacobian.inverse() * (p - g.vertices[0]);
      if (l.minCoeff() >= 0 && l.sum() <= 1) break;
    }
    REQUIRE(t < m.num_triangles());
    CHECK((evaluate_field(m, *form, layout, x, t, 0, p) - u(p)).norm() < 1e-12);
    CHECK(evaluate_field(m, *form, layout, x, t, 1, p).x() == doctest::Approx(2.0));
    const auto means = field_means(m, *form, layout, x, 0);
    CHECK((means[t] - u(m.geometry(t).centroid)).norm() < 1e-12);
  }
}

TEST_SUITE("solver") {
  TEST_CASE("dense Cholesky") {
    const DenseCholesky id(Matrix::Identity(3, 3));
    const Vector b = Vector::LinSpaced(3, 1, 3);
    CHECK(id.solve(b) == b);
    Matrix a(2, 2);
    a << 4, 2, 2, 3;
    const Vector x = DenseCholesky(a).solve(Vector((Vector(2) << 10, 8).finished()));
    CHECK(x[0] == doctest::Approx(7.0 / 4).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(3.0 / 2).epsilon(1e-15));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d;
    Matrix r(50, 50);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) r(i, j) = d(rng);
    const Matrix spd = r * r.transpose() + 50 * Matrix::Identity(50, 50);
    Vector f(50);
    for (int i = 0; i < 50; ++i) f[i] = d(rng);
    CHECK((spd * DenseCholesky(spd).solve(f) - f).norm() <= 1e-11 * f.norm());
    Matrix bad = Matrix::Identity(2, 2);
    bad(1, 1) = -1;
    CHECK_THROWS_AS(DenseCholesky{bad}, Error);
  }

  TEST_CASE("sparse solves") {
    std::vector<Triplet> diag;
    for (int i = 0; i < 5; ++i) diag.emplace_back(i, i, Real(i + 1));
    const SparseSymmetric a(5, diag);
    const Vector f = Vector::Constant(5, 6.0);
    for (auto kind : {SolverKind::Direct, SolverKind::ConjugateGradient}) {
      const SolveReport rep = sparse_spd_solve(a, f, kind);
      for (int i = 0; i < 5; ++i) CHECK(rep.x[i] == doctest::Approx(6.0 / (i + 1)).epsilon(1e-14));
      CHECK(rep.relative_residual <= 1e-10);
    }
    std::vector<Triplet> indefinite = {{0, 0, 1}, {1, 1, -1}};
    CHECK_THROWS_AS(sparse_spd_solve(SparseSymmetric(2, indefinite), Vector(Vector::Ones(2))), Error);
  }

  TEST_CASE("lower triangle entries are ignored, duplicates summed") {
    std::vector<Triplet> t = {{0, 0, 1}, {0, 0, 1}, {0, 1, 1}, {1, 0, 5}, {1, 1, 3}};
    const SparseSymmetric a(2, t);
    Matrix expect(2, 2);
    expect << 2, 1, 1, 3;
    CHECK(a.to_dense() == expect);
    std::ostringstream out;
    write_matrix_market(a, out);
    CHECK(out.str().find("%%MatrixMarket matrix coordinate real symmetric") == 0);
  }
}
