#ifndef STEKLOV_CURVE_BEM_HPP
#define STEKLOV_CURVE_BEM_HPP

// Weighted Steklov eigenvalues of smooth Jordan domains by a Nyström
// discretization of the single-layer representation u = Sμ, with interior
// flux (½I + K')μ. Logarithmic singularities use Kress's product quadrature.

#include "steklov/curve.hpp"
#include "steklov/functionals.hpp"
#include "steklov/spectrum.hpp"
#include "steklov/trig.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace steklov {

namespace detail {

// R_d = ∫ ln(4 sin²((t−τ)/2)) L_d(τ) dτ weights for t − τ = 2πd/M.
inline std::vector<double> kress_log_weights(int M) {
  const int m = M / 2;
  std::vector<double> r(static_cast<std::size_t>(M));
  for (int d = 0; d < M; ++d) {
    const double t = two_pi * d / M;
    double s = 0.0;
    for (int k = 1; k < m; ++k) s += std::cos(k * t) / k;
    r[std::size_t(d)] = -(two_pi / m) * s - (pi / (double(m) * m)) * std::cos(m * t);
  }
  return r;
}

struct CurveNodes {
  std::vector<Eigen::Vector2d> x, dx;
  std::vector<double> speed, curvature;
};

inline CurveNodes sample_curve(const CurveParametrization& c, int M) {
  CurveNodes n;
  for (double t : nodes(M)) {
    n.x.push_back(c.position(t));
    n.dx.push_back(c.derivative(t));
    n.speed.push_back(c.speed(t));
    n.curvature.push_back(c.curvature(t));
  }
  return n;
}

}  // namespace detail

/// Single-layer operator (Sμ)(x_i) = Σ_j S_ij μ_j, G = −(1/2π) ln|x − y|,
/// μ a density per unit arclength.
inline Eigen::MatrixXd single_layer_matrix(const CurveParametrization& c, int M) {
  const auto n = detail::sample_curve(c, M);
  const auto r = detail::kress_log_weights(M);
  const double h = two_pi / M;
  Eigen::MatrixXd S(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      const double m1 = -n.speed[j] / (4.0 * pi);
      double m2;
      if (i == j) {
        m2 = -n.speed[j] * std::log(n.speed[j]) / two_pi;
      } else {
        const double dt = h * (i - j);
        const double s2 = 4.0 * std::pow(std::sin(0.5 * dt), 2);
        m2 = -n.speed[j] * std::log((n.x[i] - n.x[j]).norm()) / two_pi - m1 * std::log(s2);
      }
      S(i, j) = r[std::size_t(((i - j) % M + M) % M)] * m1 + h * m2;
    }
  return S;
}

/// Normal derivative at x_i of the single layer, K'_ij, smooth kernel.
inline Eigen::MatrixXd adjoint_double_layer_matrix(const CurveParametrization& c, int M) {
  const auto n = detail::sample_curve(c, M);
  const double h = two_pi / M;
  Eigen::MatrixXd K(M, M);
  for (int i = 0; i < M; ++i) {
    const Eigen::Vector2d nu = Eigen::Vector2d(n.dx[i].y(), -n.dx[i].x()) / n.speed[i];
    for (int j = 0; j < M; ++j) {
      if (i == j) {
        K(i, j) = -h * 0.25 * n.curvature[i] * n.speed[i] / pi;
      } else {
        const Eigen::Vector2d d = n.x[i] - n.x[j];
        K(i, j) = -h * d.dot(nu) / d.squaredNorm() * n.speed[j] / two_pi;
      }
    }
  }
  return K;
}

/// Logarithmic capacity from the equilibrium problem Sμ = V, ∫ μ dL = 1.
inline double logarithmic_capacity(const CurveParametrization& c, int M) {
  const Eigen::MatrixXd S = single_layer_matrix(c, M);
  const auto n = detail::sample_curve(c, M);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M + 1, M + 1);
  A.topLeftCorner(M, M) = S;
  A.block(0, M, M, 1).setConstant(-1.0);
  for (int j = 0; j < M; ++j) A(M, j) = two_pi / M * n.speed[j];
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(M + 1);
  rhs(M) = 1.0;
  const Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
  return std::exp(-two_pi * sol(M));
}

/// Discrete weighted Steklov problem on a curve, assembled on a copy dilated
/// to capacity 1/2 (where S is safely invertible).
struct CurveProblem {
  CurveParametrization curve;  // original scale
  int nodes = 0;
  double dilation = 1.0;     // scaled curve = dilation · curve
  double capacity = 1.0;     // of the original curve
  Eigen::MatrixXd dtn;       // acting on nodal values, original scale
  Eigen::VectorXd beta;      // β at the nodes
  Eigen::VectorXd measure;   // β dL quadrature weights, original scale
  double weighted_length = 0.0;
};

inline CurveProblem assemble_curve(const CurveParametrization& curve, const std::function<double(double)>& beta, int M) {
  if (M < 8 || M % 2 != 0) throw std::invalid_argument("curve_steklov: node count must be even and >= 8");
  CurveProblem p;
  p.curve = curve;
  p.nodes = M;
  p.capacity = logarithmic_capacity(curve, M);
  p.dilation = 0.5 / p.capacity;
  const CurveParametrization scaled = curve.scaled(p.dilation);
  const Eigen::MatrixXd S = single_layer_matrix(scaled, M);
  Eigen::MatrixXd F = adjoint_double_layer_matrix(scaled, M);
  F.diagonal().array() += 0.5;
  // D = F S⁻¹, and dilating by λ divides the DtN map by λ.
  p.dtn = p.dilation * S.transpose().partialPivLu().solve(F.transpose()).transpose();
  p.beta.resize(M);
  p.measure.resize(M);
  const auto t = nodes(M);
  for (int j = 0; j < M; ++j) {
    p.beta(j) = beta(t[std::size_t(j)]);
    if (!(p.beta(j) > positivity_margin)) throw std::domain_error("curve_steklov: weight is not positive");
    p.measure(j) = p.beta(j) * curve.speed(t[std::size_t(j)]) * two_pi / M;
  }
  p.weighted_length = p.measure.sum();
  return p;
}

/// ‖D f − σ β f‖_∞ / ‖f‖_∞ for nodal values f.
inline double boundary_residual(const CurveProblem& p, const Eigen::VectorXd& trace, double sigma) {
  const Eigen::VectorXd r = p.dtn * trace - sigma * p.beta.cwiseProduct(trace);
  return r.cwiseAbs().maxCoeff() / trace.cwiseAbs().maxCoeff();
}

struct CurveSolveOptions {
  double imaginary_tolerance = 1e-6;
  double residual_tolerance = 1e-6;
  double cluster_tolerance = default_cluster_tolerance;
};

/// Smallest `count` eigenvalues; traces hold nodal values.
inline Spectrum solve_curve(const CurveProblem& p, int count, const CurveSolveOptions& opt = {}) {
  const int M = p.nodes;
  if (count < 1 || count > M) throw std::invalid_argument("curve_steklov: count must lie in [1, M]");
  const Eigen::MatrixXd A = p.beta.cwiseInverse().asDiagonal() * p.dtn;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("curve_steklov: eigensolver failed");
  struct Pair {
    double value;
    Eigen::VectorXd vec;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < M; ++i) {
    const auto lam = es.eigenvalues()(i);
    if (std::abs(lam.imag()) > opt.imaginary_tolerance * std::max(1.0, std::abs(lam.real()))) continue;
    if (lam.imag() < 0.0) continue;  // its conjugate partner supplies both real vectors
    const Eigen::VectorXcd v = es.eigenvectors().col(i);
    std::vector<Eigen::VectorXd> cand{v.real()};
    if (lam.imag() > 0.0) cand.push_back(v.imag());
    for (auto& c : cand) {
      if (c.cwiseAbs().maxCoeff() == 0.0) continue;
      if (boundary_residual(p, c, lam.real()) > opt.residual_tolerance) continue;
      pairs.push_back({lam.real(), c / std::sqrt(c.dot(p.measure.cwiseProduct(c)))});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.value < b.value; });
  if (int(pairs.size()) < count) throw std::runtime_error("curve_steklov: too few certified real eigenvalues");
  pairs.resize(std::size_t(count));
  Spectrum s;
  s.weighted_length = p.weighted_length;
  s.multiplicity_tolerance = opt.cluster_tolerance;
  Eigen::MatrixXd T(M, count);
  for (int k = 0; k < count; ++k) {
    s.eigenvalues.push_back(pairs[std::size_t(k)].value);
    T.col(k) = pairs[std::size_t(k)].vec;
  }
  s.traces = std::move(T);
  s.finalize();
  return s;
}

inline Spectrum curve_steklov(const CurveParametrization& curve, const std::function<double(double)>& beta, int M, int count,
                              const CurveSolveOptions& opt = {}) {
  return solve_curve(assemble_curve(curve, beta, M), count, opt);
}

inline Spectrum curve_steklov(const CurveParametrization& curve, const TrigPolynomial& beta, int M, int count,
                              const CurveSolveOptions& opt = {}) {
  return curve_steklov(curve, [beta](double t) { return beta(t); }, M, count, opt);
}

/// β_q = (x² + q² y²)^{-1/2} on the ellipse (cos θ, sin θ / √q).
inline std::function<double(double)> ellipse_weight_function(double q) {
  return [q](double t) { return 1.0 / std::hypot(std::cos(t), q * std::sin(t) / std::sqrt(q)); };
}

inline BoundarySamples curve_boundary_samples(const CurveProblem& p, const Spectrum& s) {
  if (!s.traces) throw std::invalid_argument("curve_boundary_samples: traces missing");
  return {p.measure, *s.traces};
}

}  // namespace steklov

#endif
