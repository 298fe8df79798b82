#pragma once

#include "divdpg/types.hpp"

#include <array>
#include <random>
#include <vector>

namespace divdpg {

/// Bivariate polynomial sum c_ij x^i y^j with i + j <= degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(int degree);

  static Polynomial constant(double c);
  static Polynomial monomial(int i, int j, double c = 1.0);
  /// Uniform random coefficients in [-1, 1] for every monomial of total degree <= degree.
  static Polynomial random(int degree, std::mt19937_64& rng);

  int degree() const { return degree_; }
  double coeff(int i, int j) const;
  void set_coeff(int i, int j, double c);

  double operator()(const Vec2& x) const;
  Polynomial dx() const;
  Polynomial dy() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial operator-() const { return *this * -1.0; }

 private:
  int degree_ = 0;
  std::vector<double> c_{0.0};  // row-major (degree+1)^2, entries with i+j>degree stay zero
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * (degree_ + 1) + j; }
};

/// Polynomial vector field in two dimensions.
struct PolyVec {
  Polynomial x;
  Polynomial y;

  Vec2 operator()(const Vec2& p) const { return {x(p), y(p)}; }
  Polynomial div() const { return x.dx() + y.dy(); }
  PolyVec operator+(const PolyVec& o) const { return {x + o.x, y + o.y}; }
  PolyVec operator-(const PolyVec& o) const { return {x - o.x, y - o.y}; }
  PolyVec operator*(double s) const { return {x * s, y * s}; }
};

inline PolyVec grad(const Polynomial& p) { return {p.dx(), p.dy()}; }

}  // namespace divdpg
