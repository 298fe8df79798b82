#include "divdpg/fortin.hpp"

#include "divdpg/quadrature.hpp"

#include <array>
#include <cmath>
#include <random>

namespace divdpg {

namespace {

const std::array<Vec2, 3> kVertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};

Vec2 outward_normal(int k) {
  const Vec2 d = kVertices[(k + 1) % 3] - kVertices[k];
  return Vec2(d.y(), -d.x()).normalized();
}

double edge_length(int k) { return (kVertices[(k + 1) % 3] - kVertices[k]).norm(); }

// inputs up to degree 8: mass moments need degree 8, H(grad div) products 16
constexpr int kVolumeDegree = 16;
constexpr int kEdgeDegree = 20;

}  // namespace

ReferenceFortin::ReferenceFortin() {
  for (int comp = 0; comp < 2; ++comp)
    for (int d = 0; d <= 3; ++d)
      for (int j = 0; j <= d; ++j) {
        const Polynomial m = Polynomial::monomial(d - j, j);
        PolyVec v{Polynomial::constant(0.0), Polynomial::constant(0.0)};
        (comp == 0 ? v.x : v.y) = m;
        basis_.push_back(v);
      }

  matrix_ = Matrix::Zero(kSize, kSize);
  const QuadRule rule = triangle_rule(kVolumeDegree);
  std::vector<PolyVec> gd(kTestDim);
  for (int i = 0; i < kTestDim; ++i) gd[i] = grad(basis_[i].div());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2& p = rule.points[q];
    for (int i = 0; i < kTestDim; ++i)
      for (int j = 0; j < kTestDim; ++j)
        matrix_(i, j) += rule.weights[q] * (basis_[i](p).dot(basis_[j](p)) + gd[i](p).dot(gd[j](p)));
  }
  for (int j = 0; j < kTestDim; ++j) {
    const Vector c = constraint_moments(basis_[j]);
    matrix_.block(kTestDim, j, kConstraints, 1) = c;
    matrix_.block(j, kTestDim, 1, kConstraints) = c.transpose();
  }
  lu_.compute(matrix_);
}

Vector ReferenceFortin::constraint_moments(const PolyVec& v) const {
  Vector m = Vector::Zero(kConstraints);
  const QuadRule rule = triangle_rule(kVolumeDegree);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 val = v(rule.points[q]);
    m[0] += rule.weights[q] * val.x();
    m[1] += rule.weights[q] * val.y();
  }
  const Polynomial div = v.div();
  const QuadRule er = edge_rule(kEdgeDegree);
  for (int k = 0; k < 3; ++k) {
    const Vec2 n = outward_normal(k);
    const double len = edge_length(k);
    for (std::size_t q = 0; q < er.size(); ++q) {
      const double s = er.points[q].x();
      const Vec2 x = (1.0 - s) * kVertices[k] + s * kVertices[(k + 1) % 3];
      const double w = er.weights[q] * len;
      m[2 + k] += w * div(x);
      const double vn = v(x).dot(n);
      m[5 + k] -= w * (1.0 - s) * vn;           // hat of vertex k
      m[5 + (k + 1) % 3] -= w * s * vn;          // hat of vertex k+1
    }
  }
  return m;
}

PolyVec ReferenceFortin::apply(const PolyVec& v) const {
  Vector rhs = Vector::Zero(kSize);
  rhs.tail(kConstraints) = constraint_moments(v);
  const Vector sol = lu_.solve(rhs);
  PolyVec out{Polynomial::constant(0.0), Polynomial::constant(0.0)};
  for (int i = 0; i < kTestDim; ++i) out = out + basis_[i] * sol[i];
  return out;
}

double ReferenceFortin::norm(const PolyVec& v) const {
  const PolyVec gd = grad(v.div());
  const QuadRule rule = triangle_rule(kVolumeDegree);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q)
    s += rule.weights[q] * (v(rule.points[q]).squaredNorm() + gd(rule.points[q]).squaredNorm());
  return std::sqrt(s);
}

FortinReport build_and_check() {
  const ReferenceFortin f;
  const Matrix& m = f.matrix();
  FortinReport r;
  r.size = static_cast<int>(m.rows());
  r.symmetry_error = (m - m.transpose()).cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  r.sigma_max = s[0];
  r.sigma_min = s[s.size() - 1];
  r.condition = r.sigma_max / r.sigma_min;
  r.nonsingular = r.sigma_min > 1e-10 * r.sigma_max;
  return r;
}

PolyVec apply_reference_fortin(const PolyVec& v) { return ReferenceFortin().apply(v); }

FortinSweep fortin_sweep(int samples, int degree, std::uint64_t seed) {
  const ReferenceFortin f;
  std::mt19937_64 rng(seed);
  FortinSweep out;
  out.samples = samples;
  for (int i = 0; i < samples; ++i) {
    const PolyVec v{Polynomial::random(degree, rng), Polynomial::random(degree, rng)};
    const PolyVec pv = f.apply(v);
    const Vector cv = f.constraint_moments(v);
    const double scale = std::max(1.0, cv.cwiseAbs().maxCoeff());
    const double orth = (cv - f.constraint_moments(pv)).cwiseAbs().maxCoeff() / scale;
    out.max_orthogonality = std::max(out.max_orthogonality, orth);
    const PolyVec ppv = f.apply(pv);
    double idem = 0.0;
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; a + b <= 3; ++b)
        idem = std::max({idem, std::abs(ppv.x.coeff(a, b) - pv.x.coeff(a, b)),
                         std::abs(ppv.y.coeff(a, b) - pv.y.coeff(a, b))});
    out.max_idempotence = std::max(out.max_idempotence, idem);
    out.boundedness = std::max(out.boundedness, f.norm(pv) / f.norm(v));
  }
  return out;
}

}  // namespace divdpg
