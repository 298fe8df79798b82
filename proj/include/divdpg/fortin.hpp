#pragma once

#include "divdpg/polynomial.hpp"
#include "divdpg/types.hpp"

#include <cstdint>
#include <vector>

namespace divdpg {

/// Mixed system on the reference triangle (0,0), (1,0), (0,1) defining a
/// projection of H(grad div) onto P^3^2 that preserves moments against P^0^2
/// fields and grad-div traces P^0(dT) x P^{1,c}(dT).
///
/// Unknowns in order: v* (20 monomial coefficients, x component first), the
/// multipliers w (2), and v_hat = (normal part: one constant per edge,
/// div part: one hat per vertex).
class ReferenceFortin {
 public:
  static constexpr int kTestDim = 20;
  static constexpr int kConstraints = 8;
  static constexpr int kSize = kTestDim + kConstraints;

  ReferenceFortin();

  const Matrix& matrix() const { return matrix_; }
  /// Canonical basis of P^3^2.
  const std::vector<PolyVec>& test_basis() const { return basis_; }

  /// Moments of v against the 8 constraint functionals: (e_x, v), (e_y, v),
  /// then <(1_E, 0), v> for edges 0..2 and <(0, hat_k), v> for vertices 0..2.
  Vector constraint_moments(const PolyVec& v) const;
  /// Pi v, for polynomial v of degree <= 8.
  PolyVec apply(const PolyVec& v) const;
  /// H(grad div) norm on the reference triangle.
  double norm(const PolyVec& v) const;

 private:
  std::vector<PolyVec> basis_;
  Matrix matrix_;
  Eigen::FullPivLU<Matrix> lu_;
};

/// Grad-div trace pairing: <(g_n, g_div), v> = int_dT g_n div v - g_div v.n ds.
struct FortinReport {
  int size = 0;
  double symmetry_error = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double condition = 0.0;
  bool nonsingular = false;  // sigma_min > 1e-10 sigma_max
};

FortinReport build_and_check();

PolyVec apply_reference_fortin(const PolyVec& v);

struct FortinSweep {
  int samples = 0;
  double max_orthogonality = 0.0;  // max |C(v - Pi v)| / max(1, |C v|)
  double max_idempotence = 0.0;    // max |Pi(Pi v) - Pi v| in coefficients
  double boundedness = 0.0;        // max |Pi v| / |v| in the H(grad div) norm
};

/// Random polynomial inputs of total degree <= degree.
FortinSweep fortin_sweep(int samples, int degree, std::uint64_t seed);

}  // namespace divdpg
