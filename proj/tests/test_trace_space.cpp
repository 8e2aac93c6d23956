#include "steklov/trig.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace steklov;

namespace {

TrigPolynomial random_poly(int degree, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
  TrigPolynomial p(degree);
  p.a0 = u(rng);
  for (int k = 0; k < degree; ++k) {
    p.cos[std::size_t(k)] = u(rng);
    p.sin[std::size_t(k)] = u(rng);
  }
  return p;
}

// Direct summation, independent of the FFT path.
double naive_eval(const TrigPolynomial& p, double t) {
  double s = p.a0;
  for (int k = 1; k <= p.degree(); ++k) s += p.a(k) * std::cos(k * t) + p.b(k) * std::sin(k * t);
  return s;
}

// Product coefficients by the product-to-sum identities.
TrigPolynomial naive_product(const TrigPolynomial& p, const TrigPolynomial& q) {
  const int n = p.degree() + q.degree();
  std::vector<double> c(std::size_t(n + 1), 0.0), s(std::size_t(n + 1), 0.0);
  auto add_cos = [&](int k, double v) { c[std::size_t(std::abs(k))] += v; };
  auto add_sin = [&](int k, double v) {
    if (k > 0) s[std::size_t(k)] += v;
    if (k < 0) s[std::size_t(-k)] -= v;
  };
  for (int j = 0; j <= p.degree(); ++j)
    for (int k = 0; k <= q.degree(); ++k) {
      const double pa = p.a(j), pb = p.b(j), qa = q.a(k), qb = q.b(k);
      add_cos(j + k, 0.5 * (pa * qa - pb * qb));
      add_cos(j - k, 0.5 * (pa * qa + pb * qb));
      add_sin(j + k, 0.5 * (pa * qb + pb * qa));
      add_sin(j - k, 0.5 * (pb * qa - pa * qb));
    }
  TrigPolynomial r(n);
  r.a0 = c[0];
  for (int k = 1; k <= n; ++k) {
    r.cos[std::size_t(k - 1)] = c[std::size_t(k)];
    r.sin[std::size_t(k - 1)] = s[std::size_t(k)];
  }
  return r;
}

}  // namespace

TEST(TraceSpace, SamplesMatchDirectSummation) {
  std::mt19937_64 rng(7);
  for (int degree : {0, 1, 5, 33}) {
    const auto p = random_poly(degree, rng);
    for (int m : {8, 64, 100}) {
      const auto v = samples(p, m);
      const auto t = nodes(m);
      for (int j = 0; j < m; ++j) EXPECT_NEAR(v[std::size_t(j)], naive_eval(p, t[std::size_t(j)]), 1e-12);
    }
  }
}

TEST(TraceSpace, FourierOfSamplesRoundTrip) {
  std::mt19937_64 rng(3);
  const auto p = random_poly(20, rng);
  const auto r = fourier_of_samples(samples(p, 64), 20);
  EXPECT_NEAR(r.a0, p.a0, 1e-14);
  for (int k = 1; k <= 20; ++k) {
    EXPECT_NEAR(r.a(k), p.a(k), 1e-13);
    EXPECT_NEAR(r.b(k), p.b(k), 1e-13);
  }
  EXPECT_THROW(fourier_of_samples(std::vector<double>(10, 1.0), 5), std::invalid_argument);
}

TEST(TraceSpace, ProductMatchesConvolution) {
  std::mt19937_64 rng(11);
  const auto p = random_poly(9, rng), q = random_poly(6, rng);
  const auto exact = naive_product(p, q);
  const auto r = product(p, q, 100);
  EXPECT_EQ(r.value.degree(), 15);
  EXPECT_NEAR(r.value.a0, exact.a0, 1e-13);
  for (int k = 1; k <= 15; ++k) {
    EXPECT_NEAR(r.value.a(k), exact.a(k), 1e-13);
    EXPECT_NEAR(r.value.b(k), exact.b(k), 1e-13);
  }
  EXPECT_DOUBLE_EQ(r.truncation_error, 0.0);
  const auto cut = product(p, q, 10);
  double dropped = 0.0;
  for (int k = 11; k <= 15; ++k) dropped += std::abs(exact.a(k)) + std::abs(exact.b(k));
  EXPECT_NEAR(cut.truncation_error, dropped, 1e-12);
}

TEST(TraceSpace, MassMatrixMatchesQuadrature) {
  std::mt19937_64 rng(5);
  TrigPolynomial beta = random_poly(12, rng, 0.05);
  beta.a0 = 1.0;
  const int n = 6;
  const auto M = toeplitz_mass_matrix(beta, n);
  // Brute-force trapezoid rule: exact for the degree-24 integrands at 400 nodes.
  const int m = 400;
  const auto t = nodes(m);
  auto basis = [n](int i, double x) {
    if (i == 0) return 1.0;
    return i <= n ? std::cos(i * x) : std::sin((i - n) * x);
  };
  for (int i = 0; i < basis_dim(n); ++i)
    for (int j = 0; j < basis_dim(n); ++j) {
      double s = 0.0;
      for (double x : t) s += basis(i, x) * basis(j, x) * naive_eval(beta, x);
      EXPECT_NEAR(M(i, j), s * two_pi / m, 1e-12) << i << "," << j;
    }
}

TEST(TraceSpace, MassMatrixIgnoresHarmonicsAboveTwiceDegree) {
  TrigPolynomial beta(10);
  beta.a0 = 2.0;
  beta.cos[9] = 0.5;  // cos 10θ cannot couple degree-4 traces
  const auto M1 = toeplitz_mass_matrix(beta, 4);
  const auto M2 = toeplitz_mass_matrix(TrigPolynomial::constant(2.0), 4);
  EXPECT_LT((M1 - M2).norm(), 1e-15);
}

TEST(TraceSpace, MassMatrixRejectsNonpositiveWeight) {
  TrigPolynomial beta(1);
  beta.a0 = 0.5;
  beta.cos[0] = 1.0;
  EXPECT_THROW(toeplitz_mass_matrix(beta, 3), std::domain_error);
}

TEST(TraceSpace, LogRepresentationMatchesBesselCoefficients) {
  // exp(a cos θ) = I_0(a) + 2 Σ I_k(a) cos kθ.
  const double a = 0.7;
  TrigPolynomial lg(1);
  lg.cos[0] = a;
  BoundaryWeight w{{lg}, BoundaryWeight::Representation::log};
  const auto d = w.direct(0, 12);
  EXPECT_NEAR(d.a0, std::cyl_bessel_i(0.0, a), 1e-14);
  for (int k = 1; k <= 12; ++k) {
    EXPECT_NEAR(d.a(k), 2.0 * std::cyl_bessel_i(double(k), a), 1e-14);
    EXPECT_NEAR(d.b(k), 0.0, 1e-15);
  }
  EXPECT_NEAR(w.value(0, 0.3), std::exp(a * std::cos(0.3)), 1e-14);
  EXPECT_TRUE(w.positive());
}

TEST(TraceSpace, RotationAndDerivative) {
  std::mt19937_64 rng(9);
  const auto p = random_poly(7, rng);
  const auto r = rotated(p, 0.8);
  const auto d = derivative(p);
  for (double t : {0.0, 1.1, 4.0}) {
    EXPECT_NEAR(r(t), p(t - 0.8), 1e-13);
    const double h = 1e-5;
    EXPECT_NEAR(d(t), (p(t + h) - p(t - h)) / (2 * h), 1e-8);
  }
}

TEST(TraceSpace, BasisIndexing) {
  EXPECT_EQ(basis_dim(5), 11);
  EXPECT_EQ(basis_frequency(0, 5), 0);
  EXPECT_EQ(basis_frequency(3, 5), 3);
  EXPECT_EQ(basis_frequency(8, 5), 3);
  EXPECT_EQ(fft_size(65), 128);
}
