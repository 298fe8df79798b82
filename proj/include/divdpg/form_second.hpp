#pragma once

#include "divdpg/formulation.hpp"

namespace divdpg {

/// Ultraweak formulation of the second-order system
///   -grad div w + u = f,  grad div u + w = 0
/// with vector fields u, w in P^p and grad-div traces û = (u.n, div u)
/// (essential) and ŵ = (w.n, div w). Tests (v, tau) live in P^{p+3}^2 x P^{p+3}^2
/// with the broken H(grad div) inner product. The scheme is analysed for p = 0;
/// larger p is only used to check consistency of the bilinear form.
class SecondOrderForm final : public Formulation {
 public:
  explicit SecondOrderForm(int p = 0, int test_degree = -1);

  struct TestBlocks {
    int v, tau;
    int size;  // 2 * dim P^{test degree}
  };

  std::string name() const override { return "second"; }
  int degree() const override { return p_; }
  int field_basis_size() const override;
  std::vector<FieldVariable> fields() const override;
  std::vector<TraceVariable> traces() const override;
  DofLayout layout(const Mesh& mesh) const override;
  int num_test_dofs() const override;
  LocalSystem local_system(const Mesh& mesh, const DofLayout& layout, int t,
                           const VectorField& f) const override;

  TestBlocks test_blocks() const;
  int test_degree() const { return td_; }
  int quadrature_degree() const { return quad_degree_; }

  Matrix gram(const Mesh& mesh, int t) const;
  Matrix b_matrix(const Mesh& mesh, const DofLayout& layout, int t) const;
  Vector load(const Mesh& mesh, int t, const VectorField& f) const;

 private:
  int p_, td_, quad_degree_;

  void assemble(const Mesh& mesh, const DofLayout* layout, int t, const VectorField* f, Matrix* gram,
                Matrix* b, Vector* load) const;
};

}  // namespace divdpg
