#pragma once

#include "divdpg/basis.hpp"
#include "divdpg/dpg_core.hpp"
#include "divdpg/form_first.hpp"
#include "divdpg/form_second.hpp"
#include "divdpg/polynomial.hpp"
#include "divdpg/problems.hpp"
#include "divdpg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace divdpg::test {

/// Problem whose exact solution is the polynomial field u.
inline ProblemSpec polynomial_problem(const PolyVec& u, DomainKind domain = DomainKind::UnitSquare) {
  const Polynomial div = u.div();
  const PolyVec gd = grad(div);
  const Polynomial dgd = gd.div();
  const PolyVec f = grad(dgd) + u;
  ProblemSpec p;
  p.name = "polynomial";
  p.domain = domain;
  p.u = [u](const Vec2& x) { return u(x); };
  p.div_u = [div](const Vec2& x) { return div(x); };
  p.grad_div_u = [gd](const Vec2& x) { return gd(x); };
  p.div_grad_div_u = [dgd](const Vec2& x) { return dgd(x); };
  p.f = [f](const Vec2& x) { return f(x); };
  p.error_quadrature_degree = 16;
  return p;
}

inline PolyVec random_polyvec(int degree, std::mt19937_64& rng) {
  return {Polynomial::random(degree, rng), Polynomial::random(degree, rng)};
}

/// Dense monolithic minimizer of sum_T |L_T^{-1}(B_T x - l_T)|^2 over the free
/// DOFs, essential DOFs fixed: every element's whitened rows are stacked into one
/// global matrix and solved by column-pivoted QR.
struct DenseOracle {
  Vector x;           // all DOFs
  double residual = 0.0;  // sqrt of the minimal functional value
};

inline DenseOracle dense_oracle(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                                const VectorField& f, const Vector& essential) {
  const int nt = mesh.num_triangles();
  const int ntest = form.num_test_dofs();
  Matrix w = Matrix::Zero(static_cast<Eigen::Index>(nt) * ntest, layout.num_free());
  Vector g = Vector::Zero(static_cast<Eigen::Index>(nt) * ntest);
  for (int t = 0; t < nt; ++t) {
    const LocalSystem ls = form.local_system(mesh, layout, t, f);
    const Eigen::LLT<Matrix> llt(ls.gram);
    const Matrix wt = llt.matrixL().solve(ls.b);
    Vector gt = llt.matrixL().solve(ls.load);
    for (std::size_t j = 0; j < ls.dofs.size(); ++j) {
      const int d = ls.dofs[j];
      if (layout.is_essential(d))
        gt -= wt.col(j) * essential[d];
      else
        w.block(t * ntest, layout.free_index(d), ntest, 1) += wt.col(j);
    }
    g.segment(t * ntest, ntest) = gt;
  }
  const Vector xf = w.colPivHouseholderQr().solve(g);
  DenseOracle out;
  out.x = essential;
  for (int d = 0; d < layout.num_dofs(); ++d)
    if (!layout.is_essential(d)) out.x[d] = xf[layout.free_index(d)];
  out.residual = (w * xf - g).norm();
  return out;
}

/// Coefficients, in the local test basis of element t, of globally defined
/// test functions (L2 projection, exact for polynomials of the test degree).
/// First-order: (v1, v2, v3, v4); the scalar fields use the x component.
inline Vector first_order_test_coefficients(const FirstOrderForm& form, const Mesh& mesh, int t,
                                            const std::vector<VectorField>& v) {
  const ElementGeometry geo = mesh.geometry(t);
  const ScalarBasis vb(geo, form.test_vector_degree()), sb(geo, form.test_scalar_degree());
  const auto tb = form.test_blocks();
  const int nv = vb.size(), ns = sb.size();
  Vector c = Vector::Zero(form.num_test_dofs());
  const QuadRule rule = triangle_rule(2 * std::max(form.test_vector_degree(), form.test_scalar_degree()) + 2);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 x = geo.map(rule.points[q]);
    const double w = rule.weights[q] * geo.det;
    const Vector cv = vb.values(x), cs = sb.values(x);
    const Vec2 v1 = v[0](x), v2 = v[1](x), v3 = v[2](x), v4 = v[3](x);
    c.segment(tb.v1, nv) += w * v1.x() * cv;
    c.segment(tb.v1 + nv, nv) += w * v1.y() * cv;
    c.segment(tb.v2, ns) += w * v2.x() * cs;
    c.segment(tb.v3, nv) += w * v3.x() * cv;
    c.segment(tb.v3 + nv, nv) += w * v3.y() * cv;
    c.segment(tb.v4, ns) += w * v4.x() * cs;
  }
  return c;
}

/// Second-order: (v, tau).
inline Vector second_order_test_coefficients(const SecondOrderForm& form, const Mesh& mesh, int t,
                                             const VectorField& v, const VectorField& tau) {
  const ElementGeometry geo = mesh.geometry(t);
  const GradDivTestBasis basis(geo, form.test_degree());
  const auto tb = form.test_blocks();
  const int n = basis.size();
  Vector c = Vector::Zero(form.num_test_dofs());
  const QuadRule rule = triangle_rule(2 * form.test_degree() + 2);
  VectorBasisValues b;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 x = geo.map(rule.points[q]);
    const double w = rule.weights[q] * geo.det;
    basis.eval(x, b, 0);
    const Vec2 vv = v(x), tt = tau(x);
    c.segment(tb.v, n) += w * (vv.x() * b.vx + vv.y() * b.vy);
    c.segment(tb.tau, n) += w * (tt.x() * b.vx + tt.y() * b.vy);
  }
  return c;
}

/// Local residual l_T - B_T x_T in the dual norm of the test space, |G_T^{-1/2} r_T|,
/// largest over the elements, relative to max(1, dual norm of l_T).
inline double max_local_residual(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                                 const VectorField& f, const Vector& x) {
  double worst = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const LocalSystem ls = form.local_system(mesh, layout, t, f);
    Vector xt(ls.dofs.size());
    for (std::size_t i = 0; i < ls.dofs.size(); ++i) xt[i] = x[ls.dofs[i]];
    const Eigen::LLT<Matrix> llt(ls.gram);
    const double scale = std::max(1.0, llt.matrixL().solve(ls.load).norm());
    worst = std::max(worst, llt.matrixL().solve(ls.load - ls.b * xt).norm() / scale);
  }
  return worst;
}

/// Trace DOFs off the boundary.
inline bool interior_trace_dof(const Mesh& mesh, const DofLayout& layout, int dof) {
  for (int f = layout.num_families() - 1; f >= 0; --f) {
    if (dof < layout.family_offset(f)) continue;
    const auto& fam = layout.families()[f];
    const int local = dof - layout.family_offset(f);
    if (fam.kind == TraceKind::Normal) return !mesh.is_boundary_edge(local / (fam.degree + 1));
    if (local < mesh.num_vertices()) return !mesh.is_boundary_vertex(local);
    return !mesh.is_boundary_edge((local - mesh.num_vertices()) / (fam.degree - 1));
  }
  return false;
}

/// sum_T c_T^T B_T over the trace columns, per global DOF.
inline Vector trace_pairing(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                            const std::function<Vector(int)>& coefficients) {
  Vector out = Vector::Zero(layout.num_dofs());
  const int nf = layout.field_dofs_per_element();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const LocalSystem ls = form.local_system(mesh, layout, t, {});
    const Vector row = coefficients(t).transpose() * ls.b;
    for (std::size_t j = nf; j < ls.dofs.size(); ++j) out[ls.dofs[j]] += row[j];
  }
  return out;
}

}  // namespace divdpg::test
