#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace divdpg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

/// Raised for violated preconditions and numerical breakdowns.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace divdpg
