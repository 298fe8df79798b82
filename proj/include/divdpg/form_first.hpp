#pragma once

#include "divdpg/formulation.hpp"

namespace divdpg {

/// Ultraweak formulation of the first-order system
///   grad u4 + u1 = f,  div u3 - u4 = 0,  grad u2 - u3 = 0,  div u1 - u2 = 0
/// with fields (u1, u2, u3, u4) in P^p and traces
///   û1 = u1.n (normal, essential), û2 = u2 (continuous, essential),
///   û3 = u3.n (normal),            û4 = u4 (continuous).
/// Test functions (v1, v2, v3, v4) live in P^{p+2}^2 x P^{p+3} x P^{p+2}^2 x P^{p+3}
/// with the broken H(div) x H^1 x H(div) x H^1 inner product.
class FirstOrderForm final : public Formulation {
 public:
  /// Test degrees default to p+2 (vector) and p+3 (scalar); any other
  /// positive values are accepted for experimentation.
  explicit FirstOrderForm(int p, int test_vector_degree = -1, int test_scalar_degree = -1);

  /// Offsets of the four test blocks inside the local test vector.
  struct TestBlocks {
    int v1, v2, v3, v4;
    int vector_size;  // components per vector block: 2 * dim P^{p+2}
    int scalar_size;  // dim P^{p+3}
  };

  std::string name() const override { return "first"; }
  int degree() const override { return p_; }
  int field_basis_size() const override;
  std::vector<FieldVariable> fields() const override;
  std::vector<TraceVariable> traces() const override;
  DofLayout layout(const Mesh& mesh) const override;
  int num_test_dofs() const override;
  LocalSystem local_system(const Mesh& mesh, const DofLayout& layout, int t,
                           const VectorField& f) const override;

  TestBlocks test_blocks() const;
  int test_vector_degree() const { return tv_; }
  int test_scalar_degree() const { return ts_; }
  int quadrature_degree() const { return quad_degree_; }

  Matrix gram(const Mesh& mesh, int t) const;
  Matrix b_matrix(const Mesh& mesh, const DofLayout& layout, int t) const;
  Vector load(const Mesh& mesh, int t, const VectorField& f) const;

 private:
  int p_, tv_, ts_, quad_degree_;

  void assemble(const Mesh& mesh, const DofLayout* layout, int t, const VectorField* f, Matrix* gram,
                Matrix* b, Vector* load) const;
};

}  // namespace divdpg
