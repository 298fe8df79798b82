#include "divdpg/dpg_core.hpp"

#include "divdpg/basis.hpp"
#include "divdpg/form_first.hpp"
#include "divdpg/form_second.hpp"
#include "divdpg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>

namespace divdpg {

std::unique_ptr<Formulation> make_formulation(FormulationKind kind, int degree) {
  if (kind == FormulationKind::First) return std::make_unique<FirstOrderForm>(degree);
  return std::make_unique<SecondOrderForm>(degree);
}

void parallel_for(int begin, int end, int threads, const std::function<void(int)>& body) {
  const int n = end - begin;
  if (n <= 0) return;
  threads = std::clamp(threads, 1, n);
  if (threads == 1) {
    for (int i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        // contiguous chunks; the result never depends on the split
        const int lo = begin + static_cast<int>(static_cast<long>(n) * w / threads);
        const int hi = begin + static_cast<int>(static_cast<long>(n) * (w + 1) / threads);
        for (int i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

Eigen::LLT<Matrix> factor_gram(const Matrix& gram, int element) {
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw Error("test Gram matrix is not positive definite on element " + std::to_string(element));
  return llt;
}

}  // namespace

namespace {

// Triangular factor [rw rc] of [w g]: w^T w = rw^T rw and w^T g = rw^T rc.
// Householder QR keeps it as accurate as w itself.
std::pair<Matrix, Vector> triangular_factor(const Matrix& w, const Vector& g) {
  const int rows = static_cast<int>(w.rows()), n = static_cast<int>(w.cols());
  Matrix wg(rows, n + 1);
  wg.leftCols(n) = w;
  wg.col(n) = g;
  const Eigen::HouseholderQR<Matrix> qr(wg);
  const int m = std::min(rows, n + 1);
  const Matrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  return {r.leftCols(n), r.col(n)};
}

// rw^T rw and rw^T rc in extended precision.
std::pair<RealMatrix, RealVector> normal_products(const Matrix& rw, const Vector& rc) {
  const RealMatrix wr = rw.cast<Real>();
  RealMatrix a = wr.transpose() * wr;
  a = (a + a.transpose()) / Real(2);
  return {a, wr.transpose() * rc.cast<Real>()};
}

std::pair<Matrix, Vector> whitened_factor(const LocalSystem& ls, int element) {
  const auto llt = factor_gram(ls.gram, element);
  return triangular_factor(llt.matrixL().solve(ls.b), llt.matrixL().solve(ls.load));
}

}  // namespace

std::pair<Matrix, Vector> schur_local(const LocalSystem& ls, int element) {
  const auto [rw, rc] = whitened_factor(ls, element);
  const auto [a, f] = normal_products(rw, rc);
  return {a.cast<double>(), f.cast<double>()};
}

CondensedLocal condense_local(const LocalSystem& ls, int num_fields, int element) {
  const auto llt = factor_gram(ls.gram, element);
  const int nloc = static_cast<int>(ls.b.cols());
  const int nt = nloc - num_fields;
  const int ntest = static_cast<int>(ls.b.rows());
  if (num_fields > ntest) throw Error("more field unknowns than test functions");
  const Matrix w = llt.matrixL().solve(ls.b);
  Matrix rest(ntest, nt + 1);
  rest.leftCols(nt) = w.rightCols(nt);
  rest.col(nt) = llt.matrixL().solve(ls.load);
  const Eigen::HouseholderQR<Matrix> qr(w.leftCols(num_fields));
  rest.applyOnTheLeft(qr.householderQ().transpose());
  CondensedLocal out;
  out.r = qr.matrixQR().topLeftCorner(num_fields, num_fields).triangularView<Eigen::Upper>();
  out.top = rest.topLeftCorner(num_fields, nt);
  out.top_g = rest.col(nt).head(num_fields);
  std::tie(out.rw, out.rc) =
      triangular_factor(rest.bottomLeftCorner(ntest - num_fields, nt), rest.col(nt).tail(ntest - num_fields));
  std::tie(out.s, out.f) = normal_products(out.rw, out.rc);
  return out;
}

namespace {

// Per-element least-squares data: the element contributes |rc - rw x_T|^2,
// x_T being the coefficients of `dofs`.
struct ElementRecord {
  Matrix rw;
  Vector rc;
  std::vector<int> dofs;
  // field recovery (condensed only)
  Matrix r, top;
  Vector top_g;
};

std::vector<ElementRecord> build_records(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                                         const VectorField& f, const SolveOptions& options, bool condensed) {
  const int nt = mesh.num_triangles();
  const int nf = layout.field_dofs_per_element();
  std::vector<ElementRecord> records(nt);
  parallel_for(0, nt, options.threads, [&](int t) {
    LocalSystem ls = form.local_system(mesh, layout, t, f);
    ElementRecord& rec = records[t];
    if (condensed) {
      CondensedLocal c = condense_local(ls, nf, t);
      rec.rw = std::move(c.rw);
      rec.rc = std::move(c.rc);
      rec.r = std::move(c.r);
      rec.top = std::move(c.top);
      rec.top_g = std::move(c.top_g);
      rec.dofs.assign(ls.dofs.begin() + nf, ls.dofs.end());
    } else {
      std::tie(rec.rw, rec.rc) = whitened_factor(ls, t);
      rec.dofs = std::move(ls.dofs);
    }
  });
  return records;
}

// Unknowns are free DOFs with free index >= offset, numbered from zero.
struct Numbering {
  const DofLayout& layout;
  int offset;
  int size;
  int operator()(int dof) const { return layout.free_index(dof) < 0 ? -1 : layout.free_index(dof) - offset; }
};

GlobalSystem assemble_records(const std::vector<ElementRecord>& records, const Numbering& num,
                              const Vector& essential_values) {
  std::vector<Triplet> triplets;
  RealVector rhs = RealVector::Zero(num.size);
  for (const ElementRecord& rec : records) {
    const auto [a, ft] = normal_products(rec.rw, rec.rc);
    const auto& d = rec.dofs;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const int fi = num(d[i]);
      if (fi < 0) continue;
      rhs[fi] += ft[i];
      for (std::size_t j = 0; j < d.size(); ++j) {
        const int fj = num(d[j]);
        if (fj < 0)
          rhs[fi] -= a(i, j) * Real(essential_values[d[j]]);
        else if (fi <= fj)
          triplets.emplace_back(fi, fj, a(i, j));
      }
    }
  }
  return {SparseSymmetric(num.size, triplets), rhs};
}

// Gradient of the discrete least-squares functional, sum_T P_T^T rw^T (rc - rw x_T),
// evaluated from the triangular factors rather than the assembled normal matrix.
RealVector ls_residual(const std::vector<ElementRecord>& records, const Numbering& num, const RealVector& x,
                       const Vector& essential_values, int threads) {
  const int n = static_cast<int>(records.size());
  std::vector<RealVector> local(n);
  parallel_for(0, n, threads, [&](int t) {
    const ElementRecord& rec = records[t];
    RealVector xt(rec.dofs.size());
    for (std::size_t i = 0; i < rec.dofs.size(); ++i) {
      const int fi = num(rec.dofs[i]);
      xt[i] = fi < 0 ? Real(essential_values[rec.dofs[i]]) : x[fi];
    }
    const RealMatrix rw = rec.rw.cast<Real>();
    local[t] = rw.transpose() * (rec.rc.cast<Real>() - rw * xt);
  });
  RealVector r = RealVector::Zero(num.size);
  for (int t = 0; t < n; ++t)
    for (std::size_t i = 0; i < records[t].dofs.size(); ++i) {
      const int fi = num(records[t].dofs[i]);
      if (fi >= 0) r[fi] += local[t][i];
    }
  return r;
}

constexpr int kMaxRefinement = 8;

struct RefinedSolve {
  RealVector x;
  double relative_residual = 0.0;
  int iterations = 0;
  long factor_nonzeros = 0;
  int steps = 0;
};

// Extended-precision factorization of the normal equations, corrected by
// iterative refinement against the element factors. The refined iterate is
// as accurate as a QR solve of the whitened least-squares problem, whose
// condition number is the square root of that of the normal equations.
RefinedSolve solve_refined(const std::vector<ElementRecord>& records, const Numbering& num,
                           const Vector& essential_values, const SolveOptions& options) {
  RefinedSolve out;
  out.x = RealVector::Zero(num.size);
  if (num.size == 0) return out;
  const GlobalSystem sys = assemble_records(records, num, essential_values);
  SparseSpdSolver solver(sys.matrix, options.solver, options.cg_tolerance);
  out.factor_nonzeros = solver.factor_nonzeros();
  const RealVector r0 = ls_residual(records, num, out.x, essential_values, options.threads);
  out.x = solver.solve(r0);
  RealVector r = ls_residual(records, num, out.x, essential_values, options.threads);
  // The residual reaches its rounding floor after the first solve while the
  // forward error keeps shrinking, so the corrections decide when to stop.
  Real previous = std::numeric_limits<Real>::infinity();
  for (int step = 1; step <= kMaxRefinement; ++step) {
    const RealVector dx = solver.solve(r);
    const Real size = dx.lpNorm<Eigen::Infinity>();
    if (!(size < 0.5L * previous)) break;
    out.x += dx;
    out.steps = step;
    r = ls_residual(records, num, out.x, essential_values, options.threads);
    previous = size;
    if (size <= 1e-16L * out.x.lpNorm<Eigen::Infinity>()) break;
  }
  const double best = equilibrated_residual(sys.matrix, r, r0);
  out.relative_residual = best;
  out.iterations = solver.iterations();
  return out;
}

void check_residual(double r) {
  if (!(r <= 1e-10)) {
    std::ostringstream msg;
    msg << "global solve residual " << r << " exceeds 1e-10";
    throw Error(msg.str());
  }
}

}  // namespace

GlobalSystem assemble_system(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                             const VectorField& f, const Vector& essential_values, const SolveOptions& options) {
  if (essential_values.size() != layout.num_dofs()) throw Error("essential value vector has the wrong size");
  const auto records = build_records(mesh, form, layout, f, options, false);
  return assemble_records(records, Numbering{layout, 0, layout.num_free()}, essential_values);
}

GlobalSystem assemble_condensed_system(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                                       const VectorField& f, const Vector& essential_values,
                                       const SolveOptions& options) {
  if (essential_values.size() != layout.num_dofs()) throw Error("essential value vector has the wrong size");
  const int first_trace = mesh.num_triangles() * layout.field_dofs_per_element();
  const auto records = build_records(mesh, form, layout, f, options, true);
  return assemble_records(records, Numbering{layout, first_trace, layout.num_free() - first_trace},
                          essential_values);
}

DiscreteSolution solve_dpg(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                           const VectorField& f, const Vector& essential_values, const SolveOptions& options) {
  if (essential_values.size() != layout.num_dofs()) throw Error("essential value vector has the wrong size");
  DiscreteSolution sol;
  sol.dim = layout.num_free();
  sol.x = Vector::Zero(layout.num_dofs());
  for (int i = 0; i < layout.num_dofs(); ++i)
    if (layout.is_essential(i)) sol.x[i] = essential_values[i];
  const int nt = mesh.num_triangles();
  const int nf = layout.field_dofs_per_element();
  // fields are never essential and come first
  const int offset = options.condense_fields ? nt * nf : 0;
  const Numbering num{layout, offset, layout.num_free() - offset};

  const auto records = build_records(mesh, form, layout, f, options, options.condense_fields);
  const RefinedSolve rs = solve_refined(records, num, essential_values, options);
  check_residual(rs.relative_residual);
  for (int i = 0; i < layout.num_dofs(); ++i)
    if (num(i) >= 0) sol.x[i] = static_cast<double>(rs.x[num(i)]);
  sol.relative_residual = rs.relative_residual;
  sol.iterations = rs.iterations;
  sol.factor_nonzeros = rs.factor_nonzeros;
  sol.refinement_steps = rs.steps;
  if (!options.condense_fields) return sol;

  parallel_for(0, nt, options.threads, [&](int t) {
    const ElementRecord& rec = records[t];
    Vector xt(rec.dofs.size());
    for (int i = 0; i < xt.size(); ++i) xt[i] = sol.x[rec.dofs[i]];
    const Vector xf = rec.r.triangularView<Eigen::Upper>().solve(rec.top_g - rec.top * xt);
    for (int i = 0; i < nf; ++i) sol.x[layout.field_dof(t, i)] = xf[i];
  });
  return sol;
}

Estimate estimate(const Mesh& mesh, const Formulation& form, const DofLayout& layout, const VectorField& f,
                  const Vector& x, const SolveOptions& options) {
  Estimate est;
  est.local.assign(mesh.num_triangles(), 0.0);
  parallel_for(0, mesh.num_triangles(), options.threads, [&](int t) {
    const LocalSystem ls = form.local_system(mesh, layout, t, f);
    Vector xt(ls.dofs.size());
    for (std::size_t i = 0; i < ls.dofs.size(); ++i) xt[i] = x[ls.dofs[i]];
    const auto llt = factor_gram(ls.gram, t);
    const Vector r = llt.matrixL().solve(ls.load - ls.b * xt);
    est.local[t] = r.norm();
  });
  double sum = 0.0;
  for (double e : est.local) sum += e * e;
  est.total = std::sqrt(sum);
  return est;
}

Vec2 evaluate_field(const Mesh& mesh, const Formulation& form, const DofLayout& layout, const Vector& x, int t,
                    int field, const Vec2& p) {
  const auto fv = form.fields().at(field);
  const ScalarBasis basis(mesh.geometry(t), form.degree());
  const Vector psi = basis.values(p);
  const int n = basis.size();
  Vec2 out = Vec2::Zero();
  for (int c = 0; c < fv.components; ++c)
    for (int k = 0; k < n; ++k) out[c] += x[layout.field_dof(t, fv.offset + c * n + k)] * psi[k];
  return out;
}

std::vector<Vec2> field_means(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                              const Vector& x, int field) {
  const QuadRule rule = triangle_rule(form.degree());
  std::vector<Vec2> means(mesh.num_triangles(), Vec2::Zero());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geo = mesh.geometry(t);
    Vec2 sum = Vec2::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q)
      sum += rule.weights[q] * evaluate_field(mesh, form, layout, x, t, field, geo.map(rule.points[q]));
    means[t] = 2.0 * sum;  // reference weights sum to 1/2
  }
  return means;
}

}  // namespace divdpg
