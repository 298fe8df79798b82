#pragma once

#include "divdpg/dof_layout.hpp"
#include "divdpg/mesh.hpp"
#include "divdpg/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace divdpg {

/// Derived quantities of the exact solution u of (grad div)^2 u + u = f.
enum class Quantity {
  U,            // u
  DivU,         // div u
  GradDivU,     // grad div u
  DivGradDivU,  // div grad div u
};

/// One field unknown (element-wise polynomial) and the exact quantity it approximates.
struct FieldVariable {
  std::string name;
  int components = 1;  // 1 (scalar) or 2 (vector)
  int offset = 0;      // first local field DOF; components are stored one after another
  Quantity quantity = Quantity::U;
  double sign = 1.0;   // field = sign * quantity
};

/// What a trace family approximates: the normal component (Normal families)
/// or the value (Continuous families) of sign * quantity.
struct TraceVariable {
  Quantity quantity = Quantity::U;
  double sign = 1.0;
};

/// Element matrices of one ultraweak formulation on one triangle.
struct LocalSystem {
  Matrix gram;            // test inner product, SPD
  Matrix b;               // rows: test DOFs, columns: local trial DOFs
  Vector load;            // test functional
  std::vector<int> dofs;  // global trial DOF of each column
};

/// A DPG discretization: broken test space with its inner product, trial
/// fields, skeleton traces, and the bilinear form coupling them.
class Formulation {
 public:
  virtual ~Formulation() = default;

  virtual std::string name() const = 0;
  /// Polynomial degree of the field unknowns.
  virtual int degree() const = 0;
  virtual int field_basis_size() const = 0;
  virtual std::vector<FieldVariable> fields() const = 0;
  /// Parallel to `layout(mesh).families()`.
  virtual std::vector<TraceVariable> traces() const = 0;
  virtual DofLayout layout(const Mesh& mesh) const = 0;
  virtual int num_test_dofs() const = 0;

  /// G_T, B_T and l_T of triangle t; `f` may be empty for zero load.
  virtual LocalSystem local_system(const Mesh& mesh, const DofLayout& layout, int t,
                                   const VectorField& f) const = 0;
};

enum class FormulationKind { First, Second };

std::unique_ptr<Formulation> make_formulation(FormulationKind kind, int degree);

}  // namespace divdpg
