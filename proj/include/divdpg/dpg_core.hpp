#pragma once

#include "divdpg/formulation.hpp"
#include "divdpg/mesh.hpp"
#include "divdpg/solver.hpp"

#include <utility>
#include <vector>

namespace divdpg {

struct SolveOptions {
  int threads = 1;
  SolverKind solver = SolverKind::Direct;
  double cg_tolerance = 1e-13;
  /// Eliminate the field unknowns element by element (QR of the whitened
  /// local matrix) and solve for the traces only. Without it the normal
  /// equations of the second-order system lose definiteness in double
  /// precision on strongly graded meshes.
  bool condense_fields = true;
};

/// A_T = B_T^T G_T^{-1} B_T and F_T = B_T^T G_T^{-1} l_T via a Cholesky factor
/// of G_T. `element` only labels the error message.
std::pair<Matrix, Vector> schur_local(const LocalSystem& ls, int element = -1);

/// Local least-squares problem min |W x - g| (W = L^{-1} B_T, g = L^{-1} l_T,
/// G_T = L L^T) with the first `num_fields` unknowns eliminated:
/// S = What^T What and F = What^T ghat for the trace unknowns, and
/// x_fields = R^{-1} (top_g - top x_traces).
struct CondensedLocal {
  RealMatrix s;
  RealVector f;
  // [rw rc] is the triangular factor of [What ghat], so S = rw^T rw, F = rw^T rc
  Matrix rw;
  Vector rc;
  Matrix r;  // upper triangular
  Matrix top;
  Vector top_g;
};

CondensedLocal condense_local(const LocalSystem& ls, int num_fields, int element = -1);

/// Constrained normal equations: unknowns are the free DOFs, essential DOFs
/// are moved to the right side with the values of `essential_values`.
struct GlobalSystem {
  SparseSymmetric matrix;
  RealVector rhs;
};

GlobalSystem assemble_system(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                             const VectorField& f, const Vector& essential_values,
                             const SolveOptions& options = {});

/// Same as assemble_system for the field-condensed trace system; unknowns are
/// the free trace DOFs in global order.
GlobalSystem assemble_condensed_system(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                                       const VectorField& f, const Vector& essential_values,
                                       const SolveOptions& options = {});

struct DiscreteSolution {
  Vector x;  // every DOF, essential ones included
  int dim = 0;  // number of free DOFs, i.e. dim U_h
  double relative_residual = 0.0;
  int iterations = 0;
  long factor_nonzeros = 0;
  int refinement_steps = 0;
};

/// Solves the DPG scheme. Throws if the relative residual exceeds 1e-10.
DiscreteSolution solve_dpg(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                           const VectorField& f, const Vector& essential_values,
                           const SolveOptions& options = {});

struct Estimate {
  std::vector<double> local;  // eta_T
  double total = 0.0;          // sqrt of the sum of eta_T^2
};

/// eta_T^2 = r^T G_T^{-1} r with r = l_T - B_T x_T.
Estimate estimate(const Mesh& mesh, const Formulation& form, const DofLayout& layout, const VectorField& f,
                  const Vector& x, const SolveOptions& options = {});

/// Value of field variable `field` (index into form.fields()) of the discrete
/// solution at point p of triangle t; scalar fields return (value, 0).
Vec2 evaluate_field(const Mesh& mesh, const Formulation& form, const DofLayout& layout, const Vector& x, int t,
                    int field, const Vec2& p);

/// Element means of a field variable.
std::vector<Vec2> field_means(const Mesh& mesh, const Formulation& form, const DofLayout& layout,
                              const Vector& x, int field);

/// Runs body(t) for t in [begin, end) on up to `threads` threads.
void parallel_for(int begin, int end, int threads, const std::function<void(int)>& body);

}  // namespace divdpg
