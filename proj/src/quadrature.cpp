#include "divdpg/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace divdpg {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw Error("gauss_legendre: need at least one point");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

QuadRule triangle_rule(int degree) {
  if (degree < 0 || degree > kMaxTriangleDegree)
    throw Error("triangle_rule: degree " + std::to_string(degree) + " out of range");
  // The collapsed coordinate picks up one extra power from the Jacobian.
  const int n = (degree + 2) / 2 + ((degree + 2) % 2);
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadRule rule;
  rule.degree = degree;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    const double s = 0.5 * (x[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double t = 0.5 * (x[j] + 1.0);
      rule.points.emplace_back(s, t * (1.0 - s));
      rule.weights.push_back(0.25 * w[i] * w[j] * (1.0 - s));
    }
  }
  return rule;
}

QuadRule edge_rule(int degree) {
  if (degree < 0) throw Error("edge_rule: negative degree");
  const int n = degree / 2 + 1;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadRule rule;
  rule.degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    rule.points.emplace_back(0.5 * (x[i] + 1.0), 0.0);
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

}  // namespace divdpg
