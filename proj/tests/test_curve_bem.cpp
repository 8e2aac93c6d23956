#include "steklov/curve_bem.hpp"
#include "steklov/ellipse.hpp"
#include "steklov/weighted_eig.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace steklov;

TEST(CurveBem, LogWeightsIntegrateCosinesExactly) {
  // ∫ ln(4 sin²(τ/2)) cos kτ dτ = −2π/k, and 0 for k = 0.
  const int M = 32;
  const auto r = detail::kress_log_weights(M);
  for (int k = 0; k < M / 2; ++k) {
    double s = 0.0;
    for (int d = 0; d < M; ++d) s += r[std::size_t(d)] * std::cos(k * two_pi * d / M);
    EXPECT_NEAR(s, k == 0 ? 0.0 : -two_pi / k, 1e-12) << k;
  }
}

TEST(CurveBem, EllipseCapacityIsMeanSemiAxis) {
  for (double q : {1.0, 2.0, 4.0, 9.0}) {
    const double b = 1.0 / std::sqrt(q);
    EXPECT_NEAR(logarithmic_capacity(CurveParametrization::ellipse(q), 128), 0.5 * (1.0 + b), 1e-12) << q;
  }
}

TEST(CurveBem, UnitCircle) {
  const auto s = curve_steklov(CurveParametrization::circle(), TrigPolynomial::constant(1.0), 64, 9);
  const double expected[] = {0, 1, 1, 2, 2, 3, 3, 4, 4};
  for (int k = 0; k < 9; ++k) EXPECT_NEAR(s.eigenvalues[std::size_t(k)], expected[k], 1e-11);
  EXPECT_NEAR(s.weighted_length, two_pi, 1e-13);
}

TEST(CurveBem, DilationScalesEigenvalues) {
  const auto c = CurveParametrization::ellipse(2.0);
  const auto a = curve_steklov(c, TrigPolynomial::constant(1.0), 128, 6);
  const auto b = curve_steklov(c.scaled(2.5), TrigPolynomial::constant(1.0), 128, 6);
  for (int k = 1; k < 6; ++k) {
    EXPECT_NEAR(b.eigenvalues[std::size_t(k)] * 2.5, a.eigenvalues[std::size_t(k)], 1e-10);
    EXPECT_NEAR(b.normalized[std::size_t(k)], a.normalized[std::size_t(k)], 1e-10);
  }
}

TEST(CurveBem, WeightedCircleMatchesSpectralDiskSolver) {
  TrigPolynomial beta(3);
  beta.a0 = 1.0;
  beta.cos = {0.3, -0.1, 0.05};
  beta.sin = {0.2, 0.0, -0.04};
  const auto bem = curve_steklov(CurveParametrization::circle(), beta, 256, 10);
  const auto flat = weighted_spectrum(DomainSpec::disk(), BoundaryWeight{{beta}, BoundaryWeight::Representation::direct}, 64, 10);
  for (int k = 1; k < 10; ++k)
    EXPECT_NEAR(bem.eigenvalues[std::size_t(k)], flat.eigenvalues[std::size_t(k)], 1e-9 * flat.eigenvalues[std::size_t(k)]) << k;
}

TEST(CurveBem, CriticalEllipseSpectrum) {
  for (double q : {1.5, 3.0}) {
    const auto s = curve_steklov(CurveParametrization::ellipse(q), ellipse_weight_function(q), 256, 9);
    const auto exact = ordered_spectrum(q, 9).spectrum;
    for (int k = 1; k < 9; ++k)
      EXPECT_NEAR(s.eigenvalues[std::size_t(k)], exact.eigenvalues[std::size_t(k)], 1e-8 * exact.eigenvalues[std::size_t(k)]) << q << " " << k;
    EXPECT_NEAR(s.weighted_length, two_pi / std::sqrt(q), 1e-12);
  }
}

TEST(CurveBem, TracesSatisfyDiscreteProblem) {
  const auto p = assemble_curve(CurveParametrization::ellipse(2.0), [](double t) { return 1.0 + 0.2 * std::cos(t); }, 128);
  const auto s = solve_curve(p, 6);
  for (int k = 1; k < 6; ++k) {
    EXPECT_LT(boundary_residual(p, s.traces->col(k), s.eigenvalues[std::size_t(k)]), 1e-9);
    EXPECT_NEAR(s.traces->col(k).dot(p.measure.cwiseProduct(s.traces->col(k))), 1.0, 1e-12);
  }
  EXPECT_THROW(assemble_curve(CurveParametrization::circle(), [](double) { return 1.0; }, 7), std::invalid_argument);
  EXPECT_THROW(assemble_curve(CurveParametrization::circle(), [](double) { return -1.0; }, 16), std::domain_error);
}
