#ifndef STEKLOV_TRIG_HPP
#define STEKLOV_TRIG_HPP

// Real trigonometric polynomials on the unit circle, periodic quadrature and
// the weighted mass matrix of the trace basis {1, cos kθ, sin kθ}.

#include <Eigen/Dense>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace steklov {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// a0 + Σ_{k=1..N} (a_k cos kθ + b_k sin kθ); cos[k-1] holds a_k.
struct TrigPolynomial {
  double a0 = 0.0;
  std::vector<double> cos;
  std::vector<double> sin;

  TrigPolynomial() = default;
  explicit TrigPolynomial(int degree) : cos(std::size_t(degree), 0.0), sin(std::size_t(degree), 0.0) {}

  static TrigPolynomial constant(double c) {
    TrigPolynomial p;
    p.a0 = c;
    return p;
  }

  int degree() const { return static_cast<int>(cos.size()); }
  double a(int k) const { return k == 0 ? a0 : (k <= degree() ? cos[k - 1] : 0.0); }
  double b(int k) const { return (k >= 1 && k <= degree()) ? sin[k - 1] : 0.0; }

  template <typename T>
  T operator()(T theta) const {
    using std::cos;
    using std::sin;
    T s = T(a0);
    for (int k = 1; k <= degree(); ++k) s += this->cos[k - 1] * cos(T(k) * theta) + this->sin[k - 1] * sin(T(k) * theta);
    return s;
  }

  /// Zero-pads or truncates to the given degree.
  TrigPolynomial resized(int n) const {
    TrigPolynomial r = *this;
    r.cos.resize(std::size_t(n), 0.0);
    r.sin.resize(std::size_t(n), 0.0);
    return r;
  }

  bool is_even(double tol = 0.0) const {
    return std::all_of(sin.begin(), sin.end(), [tol](double v) { return std::abs(v) <= tol; });
  }
};

template <typename T>
T eval(const TrigPolynomial& p, T theta) {
  return p(theta);
}

inline TrigPolynomial derivative(const TrigPolynomial& p) {
  TrigPolynomial d(p.degree());
  for (int k = 1; k <= p.degree(); ++k) {
    d.cos[k - 1] = k * p.sin[k - 1];
    d.sin[k - 1] = -k * p.cos[k - 1];
  }
  return d;
}

inline TrigPolynomial operator+(TrigPolynomial p, const TrigPolynomial& q) {
  const int n = std::max(p.degree(), q.degree());
  p = p.resized(n);
  p.a0 += q.a0;
  for (int k = 1; k <= q.degree(); ++k) {
    p.cos[k - 1] += q.cos[k - 1];
    p.sin[k - 1] += q.sin[k - 1];
  }
  return p;
}

inline TrigPolynomial operator*(double c, TrigPolynomial p) {
  p.a0 *= c;
  for (auto& v : p.cos) v *= c;
  for (auto& v : p.sin) v *= c;
  return p;
}

/// Rotation θ ↦ θ - φ, i.e. returns p(· - φ).
inline TrigPolynomial rotated(const TrigPolynomial& p, double phi) {
  TrigPolynomial r(p.degree());
  r.a0 = p.a0;
  for (int k = 1; k <= p.degree(); ++k) {
    const double c = std::cos(k * phi), s = std::sin(k * phi);
    r.cos[k - 1] = p.cos[k - 1] * c - p.sin[k - 1] * s;
    r.sin[k - 1] = p.cos[k - 1] * s + p.sin[k - 1] * c;
  }
  return r;
}

inline std::vector<double> nodes(int m) {
  std::vector<double> t(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) t[j] = two_pi * j / m;
  return t;
}

/// Trapezoid rule for ∫_0^{2π} f dθ from equispaced samples.
inline double trapezoid(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s * two_pi / double(values.size());
}

namespace detail {

// FFTW planning is not thread safe; execution with new-array calls is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::vector<std::complex<double>> rfft(const std::vector<double>& v) {
  const int m = static_cast<int>(v.size());
  std::vector<double> in(v);
  std::vector<std::complex<double>> out(std::size_t(m / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(m, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

inline std::vector<double> irfft(std::vector<std::complex<double>> spec, int m) {
  std::vector<double> out(static_cast<std::size_t>(m));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_c2r_1d(m, reinterpret_cast<fftw_complex*>(spec.data()), out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace detail

/// Values of p at the m nodes 2πj/m. Harmonics above m/2 are folded, so the
/// result is exact for any degree.
inline std::vector<double> samples(const TrigPolynomial& p, int m) {
  if (m < 1) throw std::invalid_argument("samples: need at least one node");
  std::vector<std::complex<double>> x(std::size_t(m / 2 + 1), 0.0);
  x[0] += p.a0;
  for (int k = 1; k <= p.degree(); ++k) {
    const double a = p.cos[k - 1], b = p.sin[k - 1];
    const int r = k % m;
    if (r == 0) {
      x[0] += a;
    } else if (2 * r == m) {
      x[std::size_t(r)] += a;
    } else if (2 * r < m) {
      x[std::size_t(r)] += std::complex<double>(a, -b) * 0.5;
    } else {
      x[std::size_t(m - r)] += std::complex<double>(a, b) * 0.5;
    }
  }
  // c2r doubles the interior bins implicitly; the edge bins enter once.
  return detail::irfft(std::move(x), m);
}

/// Trapezoid Fourier projection of equispaced samples onto degree n.
inline TrigPolynomial fourier_of_samples(const std::vector<double>& values, int n) {
  const int m = static_cast<int>(values.size());
  if (n < 0 || m < 2 * n + 1) throw std::invalid_argument("fourier_of_samples: need M >= 2N+1 samples");
  const auto f = detail::rfft(values);
  TrigPolynomial p(n);
  p.a0 = f[0].real() / m;
  for (int k = 1; k <= n; ++k) {
    p.cos[k - 1] = 2.0 * f[std::size_t(k)].real() / m;
    p.sin[k - 1] = -2.0 * f[std::size_t(k)].imag() / m;
  }
  return p;
}

/// Smallest power of two ≥ n.
inline int fft_size(int n) {
  int m = 1;
  while (m < n) m *= 2;
  return m;
}

struct ProductResult {
  TrigPolynomial value;
  double truncation_error = 0.0;  // ℓ1 norm of discarded harmonics
};

/// Exact product, truncated to `cap` (default 4× the larger input degree).
inline ProductResult product(const TrigPolynomial& p, const TrigPolynomial& q, int cap = -1) {
  const int full = p.degree() + q.degree();
  if (cap < 0) cap = 4 * std::max(p.degree(), q.degree());
  const int m = fft_size(2 * full + 2);
  auto u = samples(p, m), v = samples(q, m);
  for (int j = 0; j < m; ++j) u[j] *= v[j];
  ProductResult r;
  auto exact = fourier_of_samples(u, full);
  if (full > cap) {
    for (int k = cap + 1; k <= full; ++k) r.truncation_error += std::abs(exact.cos[k - 1]) + std::abs(exact.sin[k - 1]);
    exact = exact.resized(cap);
  }
  r.value = std::move(exact);
  return r;
}

inline double min_on_grid(const TrigPolynomial& p, int m = 4096) {
  const auto v = samples(p, std::max(m, 4 * p.degree()));
  return *std::min_element(v.begin(), v.end());
}

inline constexpr double positivity_margin = 1e-10;

/// Index of the trace basis: 0 ↦ 1, k ↦ cos kθ (1 ≤ k ≤ N), N+k ↦ sin kθ.
inline int basis_dim(int n) { return 2 * n + 1; }
inline int basis_frequency(int i, int n) { return i <= n ? i : i - n; }

/// Gram matrix ∫ e_i e_j β dθ of the degree-n trace basis, exact in the
/// Fourier coefficients of β (harmonics above 2n do not contribute).
inline Eigen::MatrixXd toeplitz_mass_matrix(const TrigPolynomial& beta, int n, bool check_positive = true) {
  if (check_positive && !(min_on_grid(beta) > positivity_margin))
    throw std::domain_error("toeplitz_mass_matrix: weight is not positive");
  // Cn(m) = ∫ cos(mθ) β, Sn(m) = ∫ sin(mθ) β for 0 ≤ m ≤ 2n.
  std::vector<double> cn(std::size_t(2 * n + 1)), sn(std::size_t(2 * n + 1));
  cn[0] = two_pi * beta.a0;
  sn[0] = 0.0;
  for (int m = 1; m <= 2 * n; ++m) {
    cn[std::size_t(m)] = pi * beta.a(m);
    sn[std::size_t(m)] = pi * beta.b(m);
  }
  auto C = [&](int m) { return cn[std::size_t(std::abs(m))]; };
  auto S = [&](int m) { return m >= 0 ? sn[std::size_t(m)] : -sn[std::size_t(-m)]; };

  const int d = basis_dim(n);
  Eigen::MatrixXd M(d, d);
  for (int j = 0; j <= n; ++j)
    for (int k = 0; k <= n; ++k) M(j, k) = 0.5 * (C(j - k) + C(j + k));
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= n; ++k) M(n + j, n + k) = 0.5 * (C(j - k) - C(j + k));
  for (int j = 0; j <= n; ++j)
    for (int k = 1; k <= n; ++k) {
      const double v = 0.5 * (S(k + j) + S(k - j));
      M(j, n + k) = v;
      M(n + k, j) = v;
    }
  return M;
}

/// Positive density per boundary circle, stored either as β or as log β.
struct BoundaryWeight {
  enum class Representation { direct, log };
  std::vector<TrigPolynomial> components;
  Representation representation = Representation::direct;

  static BoundaryWeight uniform(int count, double c = 1.0) {
    BoundaryWeight w;
    w.components.assign(std::size_t(count), TrigPolynomial::constant(c));
    return w;
  }

  std::size_t size() const { return components.size(); }

  /// β on circle i at θ.
  double value(std::size_t i, double theta) const {
    const double v = components[i](theta);
    return representation == Representation::log ? std::exp(v) : v;
  }

  std::vector<double> sampled(std::size_t i, int m) const {
    auto v = samples(components[i], m);
    if (representation == Representation::log)
      for (auto& x : v) x = std::exp(x);
    return v;
  }

  /// β on circle i as a direct trigonometric polynomial of degree n; for the
  /// log representation the projection uses `m` nodes (default 4n, ≥ 256).
  TrigPolynomial direct(std::size_t i, int n, int m = 0) const {
    if (representation == Representation::direct) return components[i].resized(n);
    if (m <= 0) m = std::max(256, fft_size(4 * n + 2));
    return fourier_of_samples(sampled(i, m), n);
  }

  bool positive(int m = 4096) const {
    for (std::size_t i = 0; i < size(); ++i) {
      const auto v = sampled(i, std::max(m, 4 * components[i].degree()));
      if (!(*std::min_element(v.begin(), v.end()) > positivity_margin)) return false;
    }
    return true;
  }

  bool is_even() const {
    return std::all_of(components.begin(), components.end(), [](const TrigPolynomial& p) { return p.is_even(); });
  }
};

}  // namespace steklov

#endif
