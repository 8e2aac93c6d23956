#ifndef STEKLOV_ELLIPSE_HPP
#define STEKLOV_ELLIPSE_HPP

// Closed-form Steklov spectrum of the critical ellipses E_q = {x² + q y² = 1}
// carrying the weight β_q = (x² + q² y²)^{-1/2}.

#include "steklov/spectrum.hpp"
#include "steklov/trig.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace steklov {

using Complex = std::complex<double>;

/// Complex polynomial, coefficient of z^j at index j.
struct ComplexPolynomial {
  std::vector<Complex> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  Complex operator()(Complex z) const {
    Complex s = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * z + *it;
    return s;
  }

  ComplexPolynomial derivative() const {
    ComplexPolynomial d;
    for (std::size_t j = 1; j < coeffs.size(); ++j) d.coeffs.push_back(double(j) * coeffs[j]);
    if (d.coeffs.empty()) d.coeffs.push_back(0.0);
    return d;
  }
};

inline ComplexPolynomial operator*(const ComplexPolynomial& a, const ComplexPolynomial& b) {
  ComplexPolynomial c;
  c.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) c.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
  return c;
}

struct EllipseEigenPair {
  int n = 1;
  double q = 1.0;
  double sigma = 1.0;
  double tau = 1.0;
  double A = 1.0;
  double B = 1.0;
  ComplexPolynomial polynomial;

  /// σ Re(P)² + τ Im(P)², constant on E_q.
  double c() const { return std::sqrt(q) * n * A * B; }
};

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

/// P_n^q(z) = 2^{1−n} Σ_k C(n,2k) z^{n−2k} (z² − (1 − 1/q))^k.
inline ComplexPolynomial ellipse_polynomial(int n, double q) {
  const ComplexPolynomial z2c{{Complex(-(1.0 - 1.0 / q)), 0.0, 1.0}};
  ComplexPolynomial p;
  p.coeffs.assign(std::size_t(n + 1), 0.0);
  ComplexPolynomial power{{1.0}};  // (z² − c)^k
  for (int k = 0; 2 * k <= n; ++k) {
    const double w = binomial(n, 2 * k) * std::ldexp(1.0, 1 - n);
    for (std::size_t j = 0; j < power.coeffs.size(); ++j) p.coeffs[j + std::size_t(n - 2 * k)] += w * power.coeffs[j];
    power = power * z2c;
  }
  return p;
}

inline EllipseEigenPair eigen_pair(int n, double q) {
  if (n < 1) throw std::invalid_argument("eigen_pair: n must be positive");
  if (!(q >= 1.0)) throw std::invalid_argument("eigen_pair: q must be >= 1");
  const double sq = std::sqrt(q);
  const double rn = std::pow((sq - 1.0) / (sq + 1.0), n);
  EllipseEigenPair e;
  e.n = n;
  e.q = q;
  e.sigma = n * sq * (1.0 - rn) / (1.0 + rn);
  e.tau = n * sq * (1.0 + rn) / (1.0 - rn);
  if (q == 1.0) e.tau = n;
  const double u = std::pow(0.5 * (1.0 + 1.0 / sq), n), v = std::pow(0.5 * (1.0 - 1.0 / sq), n);
  e.A = u + v;
  e.B = u - v;
  e.polynomial = ellipse_polynomial(n, q);
  return e;
}

/// Point (cos t, sin t / √q) of E_q as a complex number.
inline Complex ellipse_point(double q, double t) { return {std::cos(t), std::sin(t) / std::sqrt(q)}; }

/// β_q on E_q at parameter t.
inline double ellipse_weight(double q, double t) {
  const Complex z = ellipse_point(q, t);
  return 1.0 / std::hypot(z.real(), q * z.imag());
}

/// Max over m boundary samples of the boundary identity
/// |P(z) − (A cos nt + i B sin nt)| and the Steklov condition
/// |(x + iqy) P'(z) − σ Re P − iτ Im P|.
inline double boundary_identity_check(int n, double q, int m) {
  const auto e = eigen_pair(n, q);
  const auto dp = e.polynomial.derivative();
  double worst = 0.0;
  for (double t : nodes(m)) {
    const Complex z = ellipse_point(q, t);
    const Complex p = e.polynomial(z);
    const Complex ident = p - Complex(e.A * std::cos(n * t), e.B * std::sin(n * t));
    const Complex stek = Complex(z.real(), q * z.imag()) * dp(z) - Complex(e.sigma * p.real(), e.tau * p.imag());
    worst = std::max({worst, std::abs(ident), std::abs(stek)});
  }
  return worst;
}

/// Largest coefficient of Δ applied to Re P and Im P written in (x, y).
inline double laplacian_residual(const ComplexPolynomial& p) {
  const int n = p.degree();
  // c[a][b] is the coefficient of x^a y^b in P(x + iy).
  std::vector<std::vector<Complex>> c(std::size_t(n + 1), std::vector<Complex>(std::size_t(n + 1), 0.0));
  for (int j = 0; j <= n; ++j)
    for (int b = 0; b <= j; ++b) {
      Complex ib = std::pow(Complex(0.0, 1.0), b);
      c[std::size_t(j - b)][std::size_t(b)] += p.coeffs[std::size_t(j)] * binomial(j, b) * ib;
    }
  double worst = 0.0;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; a + b <= n - 2; ++b) {
      const Complex l = double((a + 2) * (a + 1)) * c[std::size_t(a + 2)][std::size_t(b)] +
                        double((b + 2) * (b + 1)) * c[std::size_t(a)][std::size_t(b + 2)];
      worst = std::max({worst, std::abs(l.real()), std::abs(l.imag())});
    }
  return worst;
}

struct OrderedEigenvalue {
  double value = 0.0;
  char family = '0';  // 's' for σ_n (Re P_n), 't' for τ_n (Im P_n), '0' for constants
  int n = 0;
  int index = 0;  // smallest k with σ_k = value
};

struct OrderedSpectrum {
  Spectrum spectrum;
  std::vector<OrderedEigenvalue> entries;
};

/// Merges {σ_n^q} and {τ_n^q} into the sorted spectrum (σ_0 = 0 first).
inline OrderedSpectrum ordered_spectrum(double q, int count, double tol = default_cluster_tolerance) {
  std::vector<OrderedEigenvalue> e{{0.0, '0', 0, 0}};
  // n ≤ σ_n ≤ τ_n, so mode n cannot enter once n exceeds the count-th value.
  for (int n = 1;; ++n) {
    std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    if (int(e.size()) >= count && n > e[std::size_t(count - 1)].value) break;
    const auto p = eigen_pair(n, q);
    e.push_back({p.sigma, 's', n, 0});
    e.push_back({p.tau, 't', n, 0});
  }
  std::stable_sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  e.resize(std::size_t(count));
  std::vector<double> values;
  for (const auto& x : e) values.push_back(x.value);
  OrderedSpectrum out{Spectrum::from_values(values, two_pi / std::sqrt(q), tol), {}};
  for (const auto& c : out.spectrum.clusters())
    for (int k = c.first; k < c.last; ++k) e[std::size_t(k)].index = c.first;
  out.entries = std::move(e);
  return out;
}

struct MassIntegrals {
  double length = 0.0;
  double x_mass = 0.0;
  double y_mass = 0.0;
};

inline MassIntegrals mass_integrals(double q) {
  const double sq = std::sqrt(q);
  return {two_pi / sq, pi / sq, pi / (q * sq)};
}

/// Same integrals by the trapezoid rule over β_q dL on the curve.
inline MassIntegrals mass_integrals_quadrature(double q, int m) {
  MassIntegrals r;
  const double h = two_pi / m;
  for (double t : nodes(m)) {
    const Complex z = ellipse_point(q, t);
    const double dl = std::hypot(std::sin(t), std::cos(t) / std::sqrt(q));
    const double w = ellipse_weight(q, t) * dl * h;
    r.length += w;
    r.x_mass += z.real() * z.real() * w;
    r.y_mass += z.imag() * z.imag() * w;
  }
  return r;
}

/// ∫ (σ Re² + τ Im²) β_q dL / ∫ β_q dL, which equals c_{n,q}.
inline double eigenmap_norm_quadrature(int n, double q, int m) {
  const auto e = eigen_pair(n, q);
  double num = 0.0, den = 0.0;
  for (double t : nodes(m)) {
    const Complex p = e.polynomial(ellipse_point(q, t));
    const double w = ellipse_weight(q, t) * std::hypot(std::sin(t), std::cos(t) / std::sqrt(q));
    num += (e.sigma * p.real() * p.real() + e.tau * p.imag() * p.imag()) * w;
    den += w;
  }
  return num / den;
}

/// ∫ x² β_q dL / ∫ y² β_q dL; equals q.
inline double criticality_ratio(double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("criticality_ratio: q must be >= 1");
  const auto m = mass_integrals(q);
  return m.x_mass / m.y_mass;
}

/// Root of σ_2^q − τ_1^q by bisection on [lo, hi].
inline double bifurcation_point(double lo = 2.0, double hi = 4.0, double tol = 1e-13) {
  auto f = [](double q) { return eigen_pair(2, q).sigma - eigen_pair(1, q).tau; };
  double flo = f(lo);
  if (flo * f(hi) > 0.0) throw std::invalid_argument("bifurcation_point: no sign change");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct HpsFamilyPoint {
  double q = 1.0;
  double sigma1_bar = 0.0;
  double sigma2_bar = 0.0;
  double product = 0.0;
};

/// (E_q, β_q) for 1 ≤ q ≤ 3: σ̄_1 = 2π/√q, σ̄_2 = 2π√q, product 4π².
inline std::vector<HpsFamilyPoint> hps_minimizer_family(int samples = 21) {
  std::vector<HpsFamilyPoint> out;
  for (int i = 0; i < samples; ++i) {
    const double q = 1.0 + 2.0 * i / std::max(1, samples - 1);
    const auto s = ordered_spectrum(q, 3).spectrum;
    out.push_back({q, s.normalized[1], s.normalized[2], s.normalized[1] * s.normalized[2]});
  }
  return out;
}

}  // namespace steklov

#endif
