#include "divdpg/form_first.hpp"

#include "divdpg/basis.hpp"
#include "divdpg/quadrature.hpp"

#include <algorithm>

namespace divdpg {

FirstOrderForm::FirstOrderForm(int p, int test_vector_degree, int test_scalar_degree)
    : p_(p),
      tv_(test_vector_degree < 0 ? p + 2 : test_vector_degree),
      ts_(test_scalar_degree < 0 ? p + 3 : test_scalar_degree),
      quad_degree_(2 * (std::max(tv_, ts_) + 2)) {
  if (p < 0) throw Error("FirstOrderForm: negative degree");
}

int FirstOrderForm::field_basis_size() const { return dim_polynomials(p_); }

std::vector<FieldVariable> FirstOrderForm::fields() const {
  const int n = field_basis_size();
  return {
      {"u1", 2, 0, Quantity::U, 1.0},
      {"u2", 1, 2 * n, Quantity::DivU, 1.0},
      {"u3", 2, 3 * n, Quantity::GradDivU, 1.0},
      {"u4", 1, 5 * n, Quantity::DivGradDivU, 1.0},
  };
}

std::vector<TraceVariable> FirstOrderForm::traces() const {
  return {{Quantity::U, 1.0}, {Quantity::DivU, 1.0}, {Quantity::GradDivU, 1.0}, {Quantity::DivGradDivU, 1.0}};
}

DofLayout FirstOrderForm::layout(const Mesh& mesh) const {
  return DofLayout(mesh, 6 * field_basis_size(),
                   {
                       {"u1_hat", TraceKind::Normal, p_, true},
                       {"u2_hat", TraceKind::Continuous, p_ + 1, true},
                       {"u3_hat", TraceKind::Normal, p_, false},
                       {"u4_hat", TraceKind::Continuous, p_ + 1, false},
                   });
}

FirstOrderForm::TestBlocks FirstOrderForm::test_blocks() const {
  const int nv = 2 * dim_polynomials(tv_), ns = dim_polynomials(ts_);
  return {0, nv, nv + ns, 2 * nv + ns, nv, ns};
}

int FirstOrderForm::num_test_dofs() const {
  const auto tb = test_blocks();
  return 2 * tb.vector_size + 2 * tb.scalar_size;
}

Matrix FirstOrderForm::gram(const Mesh& mesh, int t) const {
  Matrix g;
  assemble(mesh, nullptr, t, nullptr, &g, nullptr, nullptr);
  return g;
}

Matrix FirstOrderForm::b_matrix(const Mesh& mesh, const DofLayout& layout, int t) const {
  Matrix b;
  assemble(mesh, &layout, t, nullptr, nullptr, &b, nullptr);
  return b;
}

Vector FirstOrderForm::load(const Mesh& mesh, int t, const VectorField& f) const {
  Vector l;
  assemble(mesh, nullptr, t, &f, nullptr, nullptr, &l);
  return l;
}

LocalSystem FirstOrderForm::local_system(const Mesh& mesh, const DofLayout& layout, int t,
                                         const VectorField& f) const {
  LocalSystem ls;
  assemble(mesh, &layout, t, &f, &ls.gram, &ls.b, &ls.load);
  ls.dofs = layout.element_dofs(mesh, t);
  return ls;
}

void FirstOrderForm::assemble(const Mesh& mesh, const DofLayout* layout, int t, const VectorField* f,
                              Matrix* gram, Matrix* b, Vector* load) const {
  const ElementGeometry geo = mesh.geometry(t);
  const ScalarBasis vec_basis(geo, tv_), sc_basis(geo, ts_), trial_basis(geo, p_);
  const int nv = vec_basis.size(), ns = sc_basis.size(), np = trial_basis.size();
  const TestBlocks tb = test_blocks();
  const int ntest = num_test_dofs();
  const int u1 = 0, u2 = 2 * np, u3 = 3 * np, u4 = 5 * np;

  if (gram) *gram = Matrix::Zero(ntest, ntest);
  if (b) *b = Matrix::Zero(ntest, layout->local_size());
  if (load) *load = Vector::Zero(ntest);
  const bool have_load = load && f && *f;

  BasisValues chi, phi, psi;
  const QuadRule rule = triangle_rule(quad_degree_);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 x = geo.map(rule.points[q]);
    const double w = rule.weights[q] * geo.det;
    vec_basis.eval(x, chi, 1);
    sc_basis.eval(x, phi, 1);
    if (gram) {
      // H(div) blocks: components are decoupled in the mass part, coupled through div.
      for (int blk : {tb.v1, tb.v3}) {
        auto g = gram->block(blk, blk, 2 * nv, 2 * nv);
        g.topLeftCorner(nv, nv).noalias() += w * (chi.value * chi.value.transpose() + chi.dx * chi.dx.transpose());
        g.bottomRightCorner(nv, nv).noalias() +=
            w * (chi.value * chi.value.transpose() + chi.dy * chi.dy.transpose());
        g.topRightCorner(nv, nv).noalias() += w * chi.dx * chi.dy.transpose();
        g.bottomLeftCorner(nv, nv).noalias() += w * chi.dy * chi.dx.transpose();
      }
      for (int blk : {tb.v2, tb.v4}) {
        gram->block(blk, blk, ns, ns).noalias() +=
            w * (phi.value * phi.value.transpose() + phi.dx * phi.dx.transpose() + phi.dy * phi.dy.transpose());
      }
    }
    if (b) {
      trial_basis.eval(x, psi, 0);
      const Vector wpsi = w * psi.value;
      auto B = [&](int row, int rows, int col) { return b->block(row, col, rows, np); };
      // (u1, v1 - grad v4)
      B(tb.v1, nv, u1).noalias() += chi.value * wpsi.transpose();
      B(tb.v1 + nv, nv, u1 + np).noalias() += chi.value * wpsi.transpose();
      B(tb.v4, ns, u1).noalias() -= phi.dx * wpsi.transpose();
      B(tb.v4, ns, u1 + np).noalias() -= phi.dy * wpsi.transpose();
      // -(u2, v4 + div v3)
      B(tb.v4, ns, u2).noalias() -= phi.value * wpsi.transpose();
      B(tb.v3, nv, u2).noalias() -= chi.dx * wpsi.transpose();
      B(tb.v3 + nv, nv, u2).noalias() -= chi.dy * wpsi.transpose();
      // -(u3, v3 + grad v2)
      B(tb.v3, nv, u3).noalias() -= chi.value * wpsi.transpose();
      B(tb.v3 + nv, nv, u3 + np).noalias() -= chi.value * wpsi.transpose();
      B(tb.v2, ns, u3).noalias() -= phi.dx * wpsi.transpose();
      B(tb.v2, ns, u3 + np).noalias() -= phi.dy * wpsi.transpose();
      // -(u4, v2 + div v1)
      B(tb.v2, ns, u4).noalias() -= phi.value * wpsi.transpose();
      B(tb.v1, nv, u4).noalias() -= chi.dx * wpsi.transpose();
      B(tb.v1 + nv, nv, u4).noalias() -= chi.dy * wpsi.transpose();
    }
  }
  if (have_load) {
    const QuadRule lrule = triangle_rule(std::max(quad_degree_, kLoadQuadratureDegree));
    for (std::size_t q = 0; q < lrule.size(); ++q) {
      const Vec2 x = geo.map(lrule.points[q]);
      const double w = lrule.weights[q] * geo.det;
      const Vec2 fx = (*f)(x);
      const Vector v = vec_basis.values(x);
      load->segment(tb.v1, nv) += (w * fx.x()) * v;
      load->segment(tb.v1 + nv, nv) += (w * fx.y()) * v;
    }
  }

  if (!b) return;
  // Skeleton terms <û1, v4> + <û2, v3> + <û3, v2> + <û4, v1>.
  const QuadRule erule = edge_rule(quad_degree_);
  std::vector<int> idx;
  std::vector<double> val;
  for (int k = 0; k < 3; ++k) {
    const double sigma = mesh.edge_sign(t, k);
    const Vec2 n = geo.normals[k];
    for (std::size_t q = 0; q < erule.size(); ++q) {
      const double s = erule.points[q].x();
      const double w = erule.weights[q] * geo.lengths[k];
      const Vec2 x = geo.edge_point(k, s);
      const Vector chiv = vec_basis.values(x);
      const Vector phiv = sc_basis.values(x);
      // normal traces paired with scalar tests, signed by the element orientation
      for (auto [fam, blk] : {std::pair{0, tb.v4}, std::pair{2, tb.v2}}) {
        layout->edge_shapes(mesh, t, fam, k, s, idx, val);
        for (std::size_t i = 0; i < idx.size(); ++i) b->block(blk, idx[i], ns, 1) += (sigma * w * val[i]) * phiv;
      }
      // continuous traces paired with the normal component of vector tests
      for (auto [fam, blk] : {std::pair{1, tb.v3}, std::pair{3, tb.v1}}) {
        layout->edge_shapes(mesh, t, fam, k, s, idx, val);
        for (std::size_t i = 0; i < idx.size(); ++i) {
          b->block(blk, idx[i], nv, 1) += (w * val[i] * n.x()) * chiv;
          b->block(blk + nv, idx[i], nv, 1) += (w * val[i] * n.y()) * chiv;
        }
      }
    }
  }
}

}  // namespace divdpg
