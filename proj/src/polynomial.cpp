#include "divdpg/polynomial.hpp"

#include <algorithm>

namespace divdpg {

Polynomial::Polynomial(int degree)
    : degree_(std::max(degree, 0)),
      c_(static_cast<std::size_t>(degree_ + 1) * (degree_ + 1), 0.0) {}

Polynomial Polynomial::constant(double c) {
  Polynomial p(0);
  p.c_[0] = c;
  return p;
}

Polynomial Polynomial::monomial(int i, int j, double c) {
  Polynomial p(i + j);
  p.set_coeff(i, j, c);
  return p;
}

Polynomial Polynomial::random(int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Polynomial p(degree);
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) p.set_coeff(i, j, dist(rng));
  return p;
}

double Polynomial::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i + j > degree_) return 0.0;
  return c_[idx(i, j)];
}

void Polynomial::set_coeff(int i, int j, double c) {
  if (i < 0 || j < 0 || i + j > degree_) throw Error("Polynomial: coefficient index out of range");
  c_[idx(i, j)] = c;
}

double Polynomial::operator()(const Vec2& x) const {
  // Horner in y for each power of x, then Horner in x.
  double result = 0.0;
  for (int i = degree_; i >= 0; --i) {
    double inner = 0.0;
    for (int j = degree_ - i; j >= 0; --j) inner = inner * x.y() + c_[idx(i, j)];
    result = result * x.x() + inner;
  }
  return result;
}

Polynomial Polynomial::dx() const {
  Polynomial d(degree_ - 1);
  for (int i = 1; i <= degree_; ++i)
    for (int j = 0; i + j <= degree_; ++j) d.c_[d.idx(i - 1, j)] = i * c_[idx(i, j)];
  if (degree_ == 0) d.c_[0] = 0.0;
  return d;
}

Polynomial Polynomial::dy() const {
  Polynomial d(degree_ - 1);
  for (int i = 0; i <= degree_; ++i)
    for (int j = 1; i + j <= degree_; ++j) d.c_[d.idx(i, j - 1)] = j * c_[idx(i, j)];
  if (degree_ == 0) d.c_[0] = 0.0;
  return d;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r(std::max(degree_, o.degree_));
  for (int i = 0; i <= r.degree_; ++i)
    for (int j = 0; i + j <= r.degree_; ++j) r.c_[r.idx(i, j)] = coeff(i, j) + o.coeff(i, j);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(degree_ + o.degree_);
  for (int i = 0; i <= degree_; ++i)
    for (int j = 0; i + j <= degree_; ++j) {
      const double a = c_[idx(i, j)];
      if (a == 0.0) continue;
      for (int k = 0; k <= o.degree_; ++k)
        for (int l = 0; k + l <= o.degree_; ++l) r.c_[r.idx(i + k, j + l)] += a * o.c_[o.idx(k, l)];
    }
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r = *this;
  for (double& c : r.c_) c *= s;
  return r;
}

}  // namespace divdpg
