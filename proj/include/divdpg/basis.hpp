#pragma once

#include "divdpg/mesh.hpp"
#include "divdpg/types.hpp"

#include <array>
#include <vector>

namespace divdpg {

inline int dim_polynomials(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Values and derivatives of every basis function at one point.
struct BasisValues {
  Vector value, dx, dy, dxx, dxy, dyy;
};

/// L2(T)-orthonormal basis of P^p(T) in physical coordinates.
///
/// Built from the Dubiner polynomials of the reference triangle pulled back
/// through the affine map, then orthonormalized with two Cholesky passes
/// against the exact element mass matrix. Derivatives up to second order are
/// analytic.
class ScalarBasis {
 public:
  ScalarBasis(const ElementGeometry& geometry, int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  /// Rows are basis functions, columns raw Dubiner polynomials.
  const Matrix& coefficients() const { return coeffs_; }

  /// `derivatives` = 0, 1 or 2 selects how much of `out` is filled.
  void eval(const Vec2& x, BasisValues& out, int derivatives = 1) const;
  Vector values(const Vec2& x) const;

  /// Raw Dubiner polynomials with physical derivatives; mutually L2-orthogonal.
  void eval_raw(const Vec2& x, BasisValues& m, int derivatives) const;
  /// Position of the raw polynomial (or monomial) with indices (i, j), i + j <= degree.
  static int monomial_index(int i, int j) { return (i + j) * (i + j + 1) / 2 + j; }

 private:
  int degree_;
  Vec2 origin_;
  Mat2 inverse_jacobian_;
  std::vector<std::array<int, 2>> exponents_;
  Matrix coeffs_;
};

/// Values of a vector test basis at one point.
struct VectorBasisValues {
  Vector vx, vy;    // components
  Vector div;       // divergence
  Vector gdx, gdy;  // components of grad div
};

/// L2(T)-orthonormal basis of P^d(T)^2 whose first `kernel_size()` members
/// span the kernel of grad div (fields with constant divergence).
///
/// Kernel members are combinations of curls of P^{d+1}(T) and the field
/// (x - x_c, 0) only, so their grad div is exactly zero. Keeping them first
/// confines the h^{-4} part of the H(grad div) Gram matrix to a trailing block,
/// which keeps its Cholesky factorization stable on very small elements.
class GradDivTestBasis {
 public:
  GradDivTestBasis(const ElementGeometry& geometry, int degree);

  int size() const { return static_cast<int>(coeffs_.rows()); }
  int kernel_size() const { return kernel_; }
  /// `derivatives` = 0 (values), 1 (+ div) or 2 (+ grad div).
  void eval(const Vec2& x, VectorBasisValues& out, int derivatives) const;

 private:
  // features: curl q_k (k >= 1, q_k raw of degree d+1), (x - x_c, 0), psi_k e_x, psi_k e_y (psi_k orthonormal, degree d)
  ScalarBasis raw_, potential_;
  Vec2 center_;
  Matrix coeffs_;  // rows: basis functions; columns: features
  int kernel_ = 0;
};

/// Legendre polynomial P_k on [-1, 1].
double legendre(int k, double x);

/// H^{-1/2}-type trace mode k on an edge, as a function of the global edge
/// parameter s in [0,1] (s = 0 at the lower-index vertex).
inline double normal_trace_shape(int mode, double s) { return legendre(mode, 2.0 * s - 1.0); }

/// Continuous trace shapes of degree q >= 1 on one edge in the global
/// parameter s: [hat at lower vertex, hat at upper vertex, bubbles 0..q-2].
/// Bubble j is s(1-s) P_j(2s-1).
std::vector<double> continuous_trace_shapes(int degree, double s);

}  // namespace divdpg
