#include "divdpg/problems.hpp"

#include "divdpg/basis.hpp"
#include "divdpg/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace divdpg {

Vec2 ProblemSpec::quantity(Quantity q, const Vec2& x) const {
  switch (q) {
    case Quantity::U: return u(x);
    case Quantity::DivU: return {div_u(x), 0.0};
    case Quantity::GradDivU: return grad_div_u(x);
    case Quantity::DivGradDivU: return {div_grad_div_u(x), 0.0};
  }
  return Vec2::Zero();
}

namespace {

// a(t) = t^2 (t-1)^2 and its derivatives
double a0(double t) { return t * t * (t - 1) * (t - 1); }
double a1(double t) { return 4 * t * t * t - 6 * t * t + 2 * t; }
double a2(double t) { return 12 * t * t - 12 * t + 2; }
double a3(double t) { return 24 * t - 12; }
double a4(double) { return 24.0; }

// s(t) = sin^2(pi t) = (1 - cos 2 pi t)/2 and its derivatives
constexpr double pi = std::numbers::pi;
double s0(double t) { return std::sin(pi * t) * std::sin(pi * t); }
double s1(double t) { return pi * std::sin(2 * pi * t); }
double s2(double t) { return 2 * pi * pi * std::cos(2 * pi * t); }
double s3(double t) { return -4 * pi * pi * pi * std::sin(2 * pi * t); }
double s4(double t) { return -8 * pi * pi * pi * pi * std::cos(2 * pi * t); }

}  // namespace

ProblemSpec smooth_problem() {
  ProblemSpec p;
  p.name = "smooth";
  p.domain = DomainKind::UnitSquare;
  p.smooth = true;
  p.u = [](const Vec2& x) { return Vec2(a0(x.x()) * a0(x.y()), s0(x.x()) * s0(x.y())); };
  p.div_u = [](const Vec2& x) { return a1(x.x()) * a0(x.y()) + s0(x.x()) * s1(x.y()); };
  p.grad_div_u = [](const Vec2& x) {
    const double X = x.x(), Y = x.y();
    return Vec2(a2(X) * a0(Y) + s1(X) * s1(Y), a1(X) * a1(Y) + s0(X) * s2(Y));
  };
  p.div_grad_div_u = [](const Vec2& x) {
    const double X = x.x(), Y = x.y();
    return a3(X) * a0(Y) + s2(X) * s1(Y) + a1(X) * a2(Y) + s0(X) * s3(Y);
  };
  p.f = [](const Vec2& x) {
    const double X = x.x(), Y = x.y();
    // grad(div grad div u) + u
    const Vec2 g(a4(X) * a0(Y) + s3(X) * s1(Y) + a2(X) * a2(Y) + s1(X) * s3(Y),
                 a3(X) * a1(Y) + s2(X) * s2(Y) + a1(X) * a3(Y) + s0(X) * s4(Y));
    return Vec2(g.x() + a0(X) * a0(Y), g.y() + s0(X) * s0(Y));
  };
  p.error_quadrature_degree = 10;
  return p;
}

ProblemSpec lshape_problem() {
  ProblemSpec p;
  p.name = "lshape";
  p.domain = DomainKind::LShape;
  p.smooth = false;
  // u = curl v with v = r^{2/3} cos(2 phi/3): grad v = (2/3) r^{-1/3} (cos(phi/3), sin(phi/3)).
  p.u = [](const Vec2& x) {
    const double r = x.norm(), phi = std::atan2(x.y(), x.x());
    const double c = 2.0 / 3.0 * std::pow(r, -1.0 / 3.0);
    return Vec2(c * std::sin(phi / 3.0), -c * std::cos(phi / 3.0));
  };
  p.div_u = [](const Vec2&) { return 0.0; };
  p.grad_div_u = [](const Vec2&) { return Vec2(0.0, 0.0); };
  p.div_grad_div_u = [](const Vec2&) { return 0.0; };
  p.f = p.u;
  p.error_quadrature_degree = 10;
  return p;
}

ProblemSpec zero_problem() {
  ProblemSpec p;
  p.name = "zero";
  p.domain = DomainKind::UnitSquare;
  p.u = [](const Vec2&) { return Vec2(0.0, 0.0); };
  p.div_u = [](const Vec2&) { return 0.0; };
  p.grad_div_u = p.u;
  p.div_grad_div_u = p.div_u;
  p.f = p.u;
  return p;
}

Mesh initial_mesh(const ProblemSpec& problem, int unit_square_n) {
  return problem.domain == DomainKind::LShape ? make_lshape() : make_unit_square(unit_square_n);
}

namespace {

constexpr int kEdgeDegree = 20;

/// Trace DOFs of one family on global edge e for the scalar function g(s), s
/// the global edge parameter. Writes into `x` at the family's DOFs.
void project_edge(const Mesh& mesh, const DofLayout& layout, int fam, int e,
                  const std::function<double(double)>& g, Vector& x, bool vertices) {
  const auto& family = layout.families()[fam];
  const QuadRule rule = edge_rule(kEdgeDegree);
  if (family.kind == TraceKind::Normal) {
    for (int m = 0; m <= family.degree; ++m) {
      double moment = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q)
        moment += rule.weights[q] * g(rule.points[q].x()) * normal_trace_shape(m, rule.points[q].x());
      x[layout.normal_dof(fam, e, m)] = (2.0 * m + 1.0) * moment;
    }
    return;
  }
  const double g0 = g(0.0), g1 = g(1.0);
  if (vertices) {
    x[layout.vertex_dof(fam, mesh.edge(e)[0])] = g0;
    x[layout.vertex_dof(fam, mesh.edge(e)[1])] = g1;
  }
  const int nb = family.degree - 1;
  if (nb <= 0) return;
  Matrix gram = Matrix::Zero(nb, nb);
  Vector rhs = Vector::Zero(nb);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double s = rule.points[q].x();
    const auto shapes = continuous_trace_shapes(family.degree, s);
    const double remainder = g(s) - g0 * shapes[0] - g1 * shapes[1];
    for (int i = 0; i < nb; ++i) {
      rhs[i] += rule.weights[q] * remainder * shapes[2 + i];
      for (int j = 0; j < nb; ++j) gram(i, j) += rule.weights[q] * shapes[2 + i] * shapes[2 + j];
    }
  }
  const Vector c = gram.llt().solve(rhs);
  for (int j = 0; j < nb; ++j) x[layout.bubble_dof(fam, e, j)] = c[j];
}

std::function<double(double)> edge_function(const Mesh& mesh, const ProblemSpec& problem, const TraceKind kind,
                                             const TraceVariable& tv, int e) {
  const Vec2 a = mesh.vertex(mesh.edge(e)[0]), b = mesh.vertex(mesh.edge(e)[1]);
  const Vec2 n = mesh.edge_normal(e);
  return [&problem, kind, tv, a, b, n](double s) {
    const Vec2 val = tv.sign * problem.quantity(tv.quantity, (1.0 - s) * a + s * b);
    return kind == TraceKind::Normal ? val.dot(n) : val.x();
  };
}

void project_traces(const Mesh& mesh, const DofLayout& layout, const Formulation& form, const ProblemSpec& problem,
                    bool essential_only, Vector& x) {
  const auto traces = form.traces();
  for (int f = 0; f < layout.num_families(); ++f) {
    const auto& family = layout.families()[f];
    if (essential_only && !family.essential) continue;
    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (essential_only && !mesh.is_boundary_edge(e)) continue;
      project_edge(mesh, layout, f, e, edge_function(mesh, problem, family.kind, traces[f], e), x, true);
    }
  }
}

}  // namespace

Vector project_boundary_data(const Mesh& mesh, const DofLayout& layout, const Formulation& form,
                             const ProblemSpec& problem) {
  Vector x = Vector::Zero(layout.num_dofs());
  project_traces(mesh, layout, form, problem, true, x);
  return x;
}

Vector interpolate_exact(const Mesh& mesh, const DofLayout& layout, const Formulation& form,
                         const ProblemSpec& problem) {
  Vector x = Vector::Zero(layout.num_dofs());
  const auto fields = form.fields();
  const QuadRule rule = triangle_rule(problem.error_quadrature_degree + form.degree());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geo = mesh.geometry(t);
    const ScalarBasis basis(geo, form.degree());
    const int n = basis.size();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 p = geo.map(rule.points[q]);
      const double w = rule.weights[q] * geo.det;
      const Vector psi = basis.values(p);
      for (const auto& fv : fields) {
        const Vec2 val = fv.sign * problem.quantity(fv.quantity, p);
        for (int c = 0; c < fv.components; ++c)
          for (int k = 0; k < n; ++k) x[layout.field_dof(t, fv.offset + c * n + k)] += w * val[c] * psi[k];
      }
    }
  }
  project_traces(mesh, layout, form, problem, false, x);
  return x;
}

std::vector<double> exact_errors(const Mesh& mesh, const DofLayout& layout, const Formulation& form, const Vector& x,
                                 const ProblemSpec& problem) {
  const auto fields = form.fields();
  std::vector<double> err2(fields.size(), 0.0);
  const QuadRule rule = triangle_rule(problem.error_quadrature_degree);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geo = mesh.geometry(t);
    const ScalarBasis basis(geo, form.degree());
    const int n = basis.size();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 p = geo.map(rule.points[q]);
      const double w = rule.weights[q] * geo.det;
      const Vector psi = basis.values(p);
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& fv = fields[i];
        const Vec2 exact = fv.sign * problem.quantity(fv.quantity, p);
        for (int c = 0; c < fv.components; ++c) {
          double uh = 0.0;
          for (int k = 0; k < n; ++k) uh += x[layout.field_dof(t, fv.offset + c * n + k)] * psi[k];
          err2[i] += w * (exact[c] - uh) * (exact[c] - uh);
        }
      }
    }
  }
  for (double& e : err2) e = std::sqrt(e);
  return err2;
}

}  // namespace divdpg
