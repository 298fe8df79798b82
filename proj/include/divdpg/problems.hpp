#pragma once

#include "divdpg/formulation.hpp"
#include "divdpg/mesh.hpp"

#include <string>
#include <vector>

namespace divdpg {

enum class DomainKind { UnitSquare, LShape };

/// Manufactured solution of (grad div)^2 u + u = f together with the derived
/// quantities needed for traces, boundary data and error evaluation.
struct ProblemSpec {
  std::string name;
  DomainKind domain = DomainKind::UnitSquare;
  bool smooth = true;
  VectorField u;
  ScalarField div_u;
  VectorField grad_div_u;
  ScalarField div_grad_div_u;
  VectorField f;
  /// Degree of the element rule used for exact errors.
  int error_quadrature_degree = 10;

  /// Scalar quantities return (value, 0).
  Vec2 quantity(Quantity q, const Vec2& x) const;
  static bool is_vector(Quantity q) { return q == Quantity::U || q == Quantity::GradDivU; }
};

/// u = (x^2(x-1)^2 y^2(y-1)^2, sin^2(pi x) sin^2(pi y)) on (0,1)^2.
ProblemSpec smooth_problem();

/// u = curl(r^{2/3} cos(2 phi / 3)) = (d_y v, -d_x v) on the rotated L-shape; f = u.
ProblemSpec lshape_problem();

/// Zero solution and zero load on the unit square.
ProblemSpec zero_problem();

/// The problem's initial mesh: unit square with n = 2, or the six-triangle L-shape.
Mesh initial_mesh(const ProblemSpec& problem, int unit_square_n = 2);

/// Values of all essential trace DOFs (zero elsewhere).
///
/// Normal families get the edgewise L2 projection of (sign * quantity).n_E onto
/// Legendre modes; continuous families get vertex interpolation of
/// (sign * quantity) plus the L2 projection of the remainder onto edge bubbles.
Vector project_boundary_data(const Mesh& mesh, const DofLayout& layout, const Formulation& form,
                             const ProblemSpec& problem);

/// L2 errors of every field variable of `form`, in the order of `form.fields()`.
std::vector<double> exact_errors(const Mesh& mesh, const DofLayout& layout, const Formulation& form,
                                 const Vector& x, const ProblemSpec& problem);

/// Element-wise L2 projection of the exact fields and the exact traces into
/// the discrete trial space (every DOF, essential ones included).
Vector interpolate_exact(const Mesh& mesh, const DofLayout& layout, const Formulation& form,
                         const ProblemSpec& problem);

}  // namespace divdpg
