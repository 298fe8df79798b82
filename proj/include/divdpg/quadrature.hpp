#pragma once

#include "divdpg/types.hpp"

#include <vector>

namespace divdpg {

/// Quadrature rule on the reference triangle {(0,0),(1,0),(0,1)} or on [0,1].
///
/// Triangle points are reference coordinates (x, y); edge rules store the
/// abscissa in x and leave y = 0. Weights sum to the measure of the reference
/// domain (1/2 for the triangle, 1 for the interval).
struct QuadRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

inline constexpr int kMaxTriangleDegree = 40;
/// Element rule degree for load functionals of general (non-polynomial) data.
inline constexpr int kLoadQuadratureDegree = 24;

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed (Duffy) tensor Gauss rule exact for total degree <= `degree`.
QuadRule triangle_rule(int degree);

/// Gauss-Legendre rule on [0, 1] exact for polynomials of degree <= `degree`.
QuadRule edge_rule(int degree);

}  // namespace divdpg
