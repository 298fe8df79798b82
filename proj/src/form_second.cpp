#include "divdpg/form_second.hpp"

#include "divdpg/basis.hpp"
#include "divdpg/quadrature.hpp"

#include <algorithm>
#include <tuple>

namespace divdpg {

SecondOrderForm::SecondOrderForm(int p, int test_degree)
    : p_(p), td_(test_degree < 0 ? p + 3 : test_degree), quad_degree_(2 * (td_ + 2)) {
  if (p < 0) throw Error("SecondOrderForm: negative degree");
}

int SecondOrderForm::field_basis_size() const { return dim_polynomials(p_); }

std::vector<FieldVariable> SecondOrderForm::fields() const {
  const int n = field_basis_size();
  return {
      {"u", 2, 0, Quantity::U, 1.0},
      {"w", 2, 2 * n, Quantity::GradDivU, -1.0},
  };
}

std::vector<TraceVariable> SecondOrderForm::traces() const {
  return {{Quantity::U, 1.0}, {Quantity::DivU, 1.0}, {Quantity::GradDivU, -1.0}, {Quantity::DivGradDivU, -1.0}};
}

DofLayout SecondOrderForm::layout(const Mesh& mesh) const {
  return DofLayout(mesh, 4 * field_basis_size(),
                   {
                       {"u_hat_n", TraceKind::Normal, p_, true},
                       {"u_hat_div", TraceKind::Continuous, p_ + 1, true},
                       {"w_hat_n", TraceKind::Normal, p_, false},
                       {"w_hat_div", TraceKind::Continuous, p_ + 1, false},
                   });
}

SecondOrderForm::TestBlocks SecondOrderForm::test_blocks() const {
  const int n = 2 * dim_polynomials(td_);
  return {0, n, n};
}

int SecondOrderForm::num_test_dofs() const { return 2 * test_blocks().size; }

Matrix SecondOrderForm::gram(const Mesh& mesh, int t) const {
  Matrix g;
  assemble(mesh, nullptr, t, nullptr, &g, nullptr, nullptr);
  return g;
}

Matrix SecondOrderForm::b_matrix(const Mesh& mesh, const DofLayout& layout, int t) const {
  Matrix b;
  assemble(mesh, &layout, t, nullptr, nullptr, &b, nullptr);
  return b;
}

Vector SecondOrderForm::load(const Mesh& mesh, int t, const VectorField& f) const {
  Vector l;
  assemble(mesh, nullptr, t, &f, nullptr, nullptr, &l);
  return l;
}

LocalSystem SecondOrderForm::local_system(const Mesh& mesh, const DofLayout& layout, int t,
                                          const VectorField& f) const {
  LocalSystem ls;
  assemble(mesh, &layout, t, &f, &ls.gram, &ls.b, &ls.load);
  ls.dofs = layout.element_dofs(mesh, t);
  return ls;
}

void SecondOrderForm::assemble(const Mesh& mesh, const DofLayout* layout, int t, const VectorField* f,
                               Matrix* gram, Matrix* b, Vector* load) const {
  const ElementGeometry geo = mesh.geometry(t);
  const GradDivTestBasis test_basis(geo, td_);
  const ScalarBasis trial_basis(geo, p_);
  const int nv = test_basis.size(), np = trial_basis.size();
  const TestBlocks tb = test_blocks();
  const int ntest = num_test_dofs();
  const int u = 0, wf = 2 * np;

  if (gram) *gram = Matrix::Zero(ntest, ntest);
  if (b) *b = Matrix::Zero(ntest, layout->local_size());
  if (load) *load = Vector::Zero(ntest);
  const bool have_load = load && f && *f;

  VectorBasisValues chi;
  BasisValues psi;
  const QuadRule rule = triangle_rule(quad_degree_);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 x = geo.map(rule.points[q]);
    const double w = rule.weights[q] * geo.det;
    test_basis.eval(x, chi, 2);
    if (gram) {
      for (int blk : {tb.v, tb.tau}) {
        auto g = gram->block(blk, blk, nv, nv);
        g.noalias() += w * (chi.vx * chi.vx.transpose() + chi.vy * chi.vy.transpose());
        g.noalias() += w * (chi.gdx * chi.gdx.transpose() + chi.gdy * chi.gdy.transpose());
      }
    }
    if (b) {
      trial_basis.eval(x, psi, 0);
      const Vector wpsi = w * psi.value;
      // (u, v - grad div tau)
      b->block(tb.v, u, nv, np).noalias() += chi.vx * wpsi.transpose();
      b->block(tb.v, u + np, nv, np).noalias() += chi.vy * wpsi.transpose();
      b->block(tb.tau, u, nv, np).noalias() -= chi.gdx * wpsi.transpose();
      b->block(tb.tau, u + np, nv, np).noalias() -= chi.gdy * wpsi.transpose();
      // -(w, tau + grad div v)
      b->block(tb.tau, wf, nv, np).noalias() -= chi.vx * wpsi.transpose();
      b->block(tb.tau, wf + np, nv, np).noalias() -= chi.vy * wpsi.transpose();
      b->block(tb.v, wf, nv, np).noalias() -= chi.gdx * wpsi.transpose();
      b->block(tb.v, wf + np, nv, np).noalias() -= chi.gdy * wpsi.transpose();
    }
  }
  if (have_load) {
    const QuadRule lrule = triangle_rule(std::max(quad_degree_, kLoadQuadratureDegree));
    for (std::size_t q = 0; q < lrule.size(); ++q) {
      const Vec2 x = geo.map(lrule.points[q]);
      const double w = lrule.weights[q] * geo.det;
      const Vec2 fx = (*f)(x);
      test_basis.eval(x, chi, 0);
      load->segment(tb.v, nv) += w * (fx.x() * chi.vx + fx.y() * chi.vy);
    }
  }

  if (!b) return;
  // <(g_n, g_div), tau> = int g_n div tau - int g_div tau.n over the element boundary.
  const QuadRule erule = edge_rule(quad_degree_);
  std::vector<int> idx;
  std::vector<double> val;
  Vector dotn(nv);
  for (int k = 0; k < 3; ++k) {
    const double sigma = mesh.edge_sign(t, k);
    const Vec2 n = geo.normals[k];
    for (std::size_t q = 0; q < erule.size(); ++q) {
      const double s = erule.points[q].x();
      const double w = erule.weights[q] * geo.lengths[k];
      test_basis.eval(geo.edge_point(k, s), chi, 1);
      dotn = n.x() * chi.vx + n.y() * chi.vy;
      // û pairs with tau, ŵ with v
      for (auto [fam_n, fam_d, blk] : {std::tuple{0, 1, tb.tau}, std::tuple{2, 3, tb.v}}) {
        layout->edge_shapes(mesh, t, fam_n, k, s, idx, val);
        for (std::size_t i = 0; i < idx.size(); ++i) b->block(blk, idx[i], nv, 1) += (sigma * w * val[i]) * chi.div;
        layout->edge_shapes(mesh, t, fam_d, k, s, idx, val);
        for (std::size_t i = 0; i < idx.size(); ++i) b->block(blk, idx[i], nv, 1) -= (w * val[i]) * dotn;
      }
    }
  }
}

}  // namespace divdpg
