#ifndef STEKLOV_CURVE_HPP
#define STEKLOV_CURVE_HPP

#include "steklov/trig.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

namespace steklov {

/// Smooth 2π-periodic Jordan curve θ ↦ γ(θ) with first and second derivatives.
struct CurveParametrization {
  std::function<Eigen::Vector2d(double)> position;
  std::function<Eigen::Vector2d(double)> derivative;
  std::function<Eigen::Vector2d(double)> second_derivative;
  std::optional<double> ellipse_q;  // set for (cos θ, sin θ / √q)

  double speed(double t) const { return derivative(t).norm(); }

  /// Signed curvature for a counterclockwise parametrization.
  double curvature(double t) const {
    const Eigen::Vector2d d1 = derivative(t), d2 = second_derivative(t);
    const double s = d1.norm();
    return (d1.x() * d2.y() - d1.y() * d2.x()) / (s * s * s);
  }

  static CurveParametrization ellipse(double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("ellipse: q must be >= 1");
    const double r = 1.0 / std::sqrt(q);
    CurveParametrization c;
    c.position = [r](double t) { return Eigen::Vector2d(std::cos(t), r * std::sin(t)); };
    c.derivative = [r](double t) { return Eigen::Vector2d(-std::sin(t), r * std::cos(t)); };
    c.second_derivative = [r](double t) { return Eigen::Vector2d(-std::cos(t), -r * std::sin(t)); };
    c.ellipse_q = q;
    return c;
  }

  static CurveParametrization circle() { return ellipse(1.0); }

  /// Curve given by Fourier series of its coordinates (e.g. fitted to a table).
  static CurveParametrization fourier(const TrigPolynomial& x, const TrigPolynomial& y) {
    const auto dx = steklov::derivative(x), dy = steklov::derivative(y);
    const auto ddx = steklov::derivative(dx), ddy = steklov::derivative(dy);
    CurveParametrization c;
    c.position = [x, y](double t) { return Eigen::Vector2d(x(t), y(t)); };
    c.derivative = [dx, dy](double t) { return Eigen::Vector2d(dx(t), dy(t)); };
    c.second_derivative = [ddx, ddy](double t) { return Eigen::Vector2d(ddx(t), ddy(t)); };
    return c;
  }

  /// Dilation about the origin.
  CurveParametrization scaled(double lambda) const {
    CurveParametrization c;
    auto p = position, d = derivative, dd = second_derivative;
    c.position = [p, lambda](double t) { return Eigen::Vector2d(lambda * p(t)); };
    c.derivative = [d, lambda](double t) { return Eigen::Vector2d(lambda * d(t)); };
    c.second_derivative = [dd, lambda](double t) { return Eigen::Vector2d(lambda * dd(t)); };
    return c;
  }
};

}  // namespace steklov

#endif
