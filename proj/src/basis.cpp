#include "divdpg/basis.hpp"

#include "divdpg/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace divdpg {

namespace {

constexpr int kMaxDegree = 30;

// Jacobi P_j^{(alpha,0)}(z) with first and second derivatives, j = 0..n
void jacobi_table(int n, double alpha, double z, double* p, double* dp, double* ddp) {
  p[0] = 1.0;
  dp[0] = ddp[0] = 0.0;
  if (n < 1) return;
  p[1] = 0.5 * ((alpha + 2.0) * z + alpha);
  dp[1] = 0.5 * (alpha + 2.0);
  ddp[1] = 0.0;
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + alpha;
    const double d = 2.0 * (k + 1) * (k + alpha + 1) * s;
    const double a = (s + 1) * (s + 2) * s / d, b = (s + 1) * alpha * alpha / d;
    const double c = 2.0 * k * (k + alpha) * (s + 2) / d;
    p[k + 1] = (a * z + b) * p[k] - c * p[k - 1];
    dp[k + 1] = a * p[k] + (a * z + b) * dp[k] - c * dp[k - 1];
    ddp[k + 1] = 2.0 * a * dp[k] + (a * z + b) * ddp[k] - c * ddp[k - 1];
  }
}

}  // namespace

ScalarBasis::ScalarBasis(const ElementGeometry& geometry, int degree)
    : degree_(degree), origin_(geometry.vertices[0]), inverse_jacobian_(geometry.jacobian.inverse()) {
  if (degree < 0) throw Error("ScalarBasis: negative degree");
  if (degree > kMaxDegree) throw Error("ScalarBasis: degree too large");
  for (int d = 0; d <= degree; ++d)
    for (int j = 0; j <= d; ++j) exponents_.push_back({d - j, j});
  const int n = size();

  const QuadRule rule = triangle_rule(2 * degree);
  Matrix mass = Matrix::Zero(n, n);
  BasisValues m;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    eval_raw(geometry.map(rule.points[q]), m, 0);
    mass.noalias() += (rule.weights[q] * geometry.det) * m.value * m.value.transpose();
  }
  // the second Cholesky pass mops up what the first loses to rounding
  coeffs_ = Matrix::Identity(n, n);
  for (int pass = 0; pass < 2; ++pass) {
    const Matrix gram = coeffs_ * mass * coeffs_.transpose();
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) throw Error("ScalarBasis: mass matrix not SPD");
    coeffs_ = llt.matrixL().solve(coeffs_);
  }
}

void ScalarBasis::eval_raw(const Vec2& x, BasisValues& m, int derivatives) const {
  const int n = size(), p = degree_;
  const Vec2 r = inverse_jacobian_ * (x - origin_);
  // collapsed variables: Q_i(u, t) = t^i P_i(u / t) is a polynomial, no singular vertex
  const double u = 2.0 * r.x() + r.y() - 1.0, t = 1.0 - r.y(), z = 2.0 * r.y() - 1.0;
  std::array<double, kMaxDegree + 1> q, qu, qt, quu, qut, qtt;
  q[0] = 1.0;
  qu[0] = qt[0] = quu[0] = qut[0] = qtt[0] = 0.0;
  if (p >= 1) {
    q[1] = u;
    qu[1] = 1.0;
    qt[1] = quu[1] = qut[1] = qtt[1] = 0.0;
  }
  for (int i = 1; i < p; ++i) {
    const double a = (2.0 * i + 1) / (i + 1), c = static_cast<double>(i) / (i + 1), t2 = t * t;
    q[i + 1] = a * u * q[i] - c * t2 * q[i - 1];
    qu[i + 1] = a * (q[i] + u * qu[i]) - c * t2 * qu[i - 1];
    qt[i + 1] = a * u * qt[i] - c * (2 * t * q[i - 1] + t2 * qt[i - 1]);
    quu[i + 1] = a * (2 * qu[i] + u * quu[i]) - c * t2 * quu[i - 1];
    qut[i + 1] = a * (qt[i] + u * qut[i]) - c * (2 * t * qu[i - 1] + t2 * qut[i - 1]);
    qtt[i + 1] = a * u * qtt[i] - c * (2 * q[i - 1] + 4 * t * qt[i - 1] + t2 * qtt[i - 1]);
  }
  m.value.resize(n);
  if (derivatives >= 1) {
    m.dx.resize(n);
    m.dy.resize(n);
  }
  if (derivatives >= 2) {
    m.dxx.resize(n);
    m.dxy.resize(n);
    m.dyy.resize(n);
  }
  const Mat2& g = inverse_jacobian_;
  std::array<double, kMaxDegree + 1> jp, jd, jdd;
  for (int i = 0; i <= p; ++i) {
    jacobi_table(p - i, 2.0 * i + 1, z, jp.data(), jd.data(), jdd.data());
    // reference derivatives of Q_i (u_x = 2, u_y = 1, t_y = -1)
    const double qx = 2 * qu[i], qy = qu[i] - qt[i];
    const double qxx = 4 * quu[i], qxy = 2 * (quu[i] - qut[i]), qyy = quu[i] - 2 * qut[i] + qtt[i];
    for (int j = 0; i + j <= p; ++j) {
      const int k = monomial_index(i, j);
      const double jy = 2 * jd[j], jyy = 4 * jdd[j];
      m.value[k] = q[i] * jp[j];
      if (derivatives >= 1) {
        const double fx = qx * jp[j], fy = qy * jp[j] + q[i] * jy;
        m.dx[k] = g(0, 0) * fx + g(1, 0) * fy;
        m.dy[k] = g(0, 1) * fx + g(1, 1) * fy;
      }
      if (derivatives >= 2) {
        Mat2 h;
        h(0, 0) = qxx * jp[j];
        h(0, 1) = h(1, 0) = qxy * jp[j] + qx * jy;
        h(1, 1) = qyy * jp[j] + 2 * qy * jy + q[i] * jyy;
        const Mat2 hp = g.transpose() * h * g;
        m.dxx[k] = hp(0, 0);
        m.dxy[k] = hp(0, 1);
        m.dyy[k] = hp(1, 1);
      }
    }
  }
}

void ScalarBasis::eval(const Vec2& x, BasisValues& out, int derivatives) const {
  BasisValues m;
  eval_raw(x, m, derivatives);
  out.value.noalias() = coeffs_ * m.value;
  if (derivatives >= 1) {
    out.dx.noalias() = coeffs_ * m.dx;
    out.dy.noalias() = coeffs_ * m.dy;
  }
  if (derivatives >= 2) {
    out.dxx.noalias() = coeffs_ * m.dxx;
    out.dxy.noalias() = coeffs_ * m.dxy;
    out.dyy.noalias() = coeffs_ * m.dyy;
  }
}

Vector ScalarBasis::values(const Vec2& x) const {
  BasisValues b;
  eval(x, b, 0);
  return b.value;
}

double legendre(int k, double x) {
  if (k == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int n = 2; n <= k; ++n) {
    const double pn = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
    p0 = p1;
    p1 = pn;
  }
  return p1;
}

std::vector<double> continuous_trace_shapes(int degree, double s) {
  if (degree < 1) throw Error("continuous_trace_shapes: degree must be >= 1");
  std::vector<double> shapes(degree + 1);
  shapes[0] = 1.0 - s;
  shapes[1] = s;
  for (int j = 0; j + 2 <= degree; ++j) shapes[2 + j] = s * (1.0 - s) * legendre(j, 2.0 * s - 1.0);
  return shapes;
}

}  // namespace divdpg

namespace divdpg {

GradDivTestBasis::GradDivTestBasis(const ElementGeometry& geometry, int degree)
    : raw_(geometry, degree), potential_(geometry, degree + 1), center_(geometry.centroid) {
  const int n = raw_.size(), np = potential_.size();
  kernel_ = np;  // np - 1 curls and (x - x_c, 0)
  const int nfeat = np + 2 * n;

  // kernel features and their inner products with the orthonormal vector basis psi_k e_x, psi_k e_y
  const QuadRule rule = triangle_rule(2 * degree + 2);
  Matrix kmass = Matrix::Zero(np, np), cross = Matrix::Zero(np, 2 * n);
  BasisValues m, pm;
  Vector kx(np), ky(np);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Vec2 x = geometry.map(rule.points[q]);
    raw_.eval(x, m, 0);
    potential_.eval_raw(x, pm, 1);
    kx.head(np - 1) = pm.dy.tail(np - 1);
    ky.head(np - 1) = -pm.dx.tail(np - 1);
    kx[np - 1] = x.x() - center_.x();
    ky[np - 1] = 0.0;
    const double w = rule.weights[q] * geometry.det;
    kmass.noalias() += w * (kx * kx.transpose() + ky * ky.transpose());
    cross.leftCols(n).noalias() += w * kx * m.value.transpose();
    cross.rightCols(n).noalias() += w * ky * m.value.transpose();
  }
  // orthonormal kernel block, two Cholesky passes
  Matrix ck = Matrix::Identity(np, np);
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::LLT<Matrix> llt(ck * kmass * ck.transpose());
    if (llt.info() != Eigen::Success) throw Error("GradDivTestBasis: kernel mass matrix not SPD");
    ck = llt.matrixL().solve(ck);
  }
  // complement: the projector onto the orthogonal complement of the kernel, in
  // the orthonormal vector basis, has eigenvalues 0 (kernel) and 1
  const Matrix a = ck * cross;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix::Identity(2 * n, 2 * n) - a.transpose() * a);
  const int nc = 2 * n - np;
  if (eig.info() != Eigen::Success || eig.eigenvalues()[np - 1] > 0.5 || eig.eigenvalues()[np] < 0.5)
    throw Error("GradDivTestBasis: kernel complement not separated");

  coeffs_ = Matrix::Zero(2 * n, nfeat);
  coeffs_.topLeftCorner(np, np) = ck;
  coeffs_.bottomRightCorner(nc, 2 * n) = eig.eigenvectors().rightCols(nc).transpose();
}

void GradDivTestBasis::eval(const Vec2& x, VectorBasisValues& out, int derivatives) const {
  const int n = raw_.size(), np = potential_.size();
  BasisValues m, pm;
  raw_.eval(x, m, derivatives);
  potential_.eval_raw(x, pm, 1);
  const auto ck = coeffs_.leftCols(np - 1);
  const auto cl = coeffs_.col(np - 1);
  const auto cx = coeffs_.middleCols(np, n), cy = coeffs_.rightCols(n);
  out.vx.noalias() = ck * pm.dy.tail(np - 1) + cx * m.value;
  out.vx += (x.x() - center_.x()) * cl;
  out.vy.noalias() = -ck * pm.dx.tail(np - 1) + cy * m.value;
  if (derivatives >= 1) {
    out.div.noalias() = cx * m.dx + cy * m.dy;
    out.div += cl;
  }
  if (derivatives >= 2) {
    out.gdx.noalias() = cx * m.dxx + cy * m.dxy;
    out.gdy.noalias() = cx * m.dxy + cy * m.dyy;
    out.gdx.head(kernel_).setZero();
    out.gdy.head(kernel_).setZero();
  }
}

}  // namespace divdpg
