#ifndef STEKLOV_DOMAIN_HPP
#define STEKLOV_DOMAIN_HPP

#include "steklov/curve.hpp"

#include <memory>
#include <stdexcept>
#include <string>

namespace steklov {

/// Conformal domain: unit disk, flat annulus 𝔻∖𝔻_ρ, Möbius band obtained from
/// the annulus 𝔻∖𝔻_{ε²} by the antipodal involution, or a smooth Jordan domain.
struct DomainSpec {
  enum class Kind { disk, annulus, moebius, curve };

  Kind kind = Kind::disk;
  double parameter = 0.0;  // ρ for the annulus, ε for the Möbius band
  std::shared_ptr<const CurveParametrization> shape;

  static DomainSpec disk() { return {}; }

  static DomainSpec annulus(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("annulus: rho must lie in (0,1)");
    return {Kind::annulus, rho, nullptr};
  }

  static DomainSpec moebius(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("moebius: eps must lie in (0,1)");
    return {Kind::moebius, eps, nullptr};
  }

  static DomainSpec smooth_curve(CurveParametrization c) {
    return {Kind::curve, 0.0, std::make_shared<const CurveParametrization>(std::move(c))};
  }

  int boundary_count() const { return kind == Kind::annulus ? 2 : 1; }

  /// Euclidean length of boundary circle i for the three flat models.
  double circle_scale(int i) const { return (kind == Kind::annulus && i == 1) ? parameter : 1.0; }

  std::string name() const {
    switch (kind) {
      case Kind::disk: return "disk";
      case Kind::annulus: return "annulus";
      case Kind::moebius: return "moebius";
      case Kind::curve: return "curve";
    }
    return "?";
  }
};

}  // namespace steklov

#endif
