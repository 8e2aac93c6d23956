#ifndef STEKLOV_EXACT_DTN_HPP
#define STEKLOV_EXACT_DTN_HPP

// Per-mode Dirichlet energies of harmonic extensions on the disk, the flat
// annulus and the Möbius band, with the closed-form spectra they produce for
// the uniform weight.

#include "steklov/spectrum.hpp"
#include "steklov/trig.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace steklov {

/// Energy form of the harmonic extension of one real Fourier mode. Entries are
/// for the traces cos kθ (or sin kθ), hence the factor π relative to the
/// symbol; for the annulus the order is (outer, inner).
struct ModeBlock {
  int mode = 0;
  Eigen::MatrixXd stiffness;
  std::string basis;
};

inline double disk_dtn_symbol(int k) {
  if (k < 0) throw std::invalid_argument("disk_dtn_symbol: negative mode");
  return double(k);
}

inline ModeBlock disk_mode_block(int k) {
  if (k < 0) throw std::invalid_argument("disk_mode_block: negative mode");
  return {k, Eigen::MatrixXd::Constant(1, 1, pi * k), "r^k"};
}

inline void check_modulus(double r, const char* what) {
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument(std::string(what) + ": parameter must lie in (0,1)");
}

inline ModeBlock annulus_mode_block(double rho, int k) {
  check_modulus(rho, "annulus_mode_block");
  if (k < 0) throw std::invalid_argument("annulus_mode_block: negative mode");
  ModeBlock b;
  b.mode = k;
  b.stiffness.resize(2, 2);
  if (k == 0) {
    const double c = two_pi / std::log(1.0 / rho);
    b.stiffness << c, -c, -c, c;
    b.basis = "{1, log r}";
  } else {
    const double t = std::pow(rho, k);
    const double s = pi * k / (1.0 - t * t);
    b.stiffness << s * (1.0 + t * t), -2.0 * s * t, -2.0 * s * t, s * (1.0 + t * t);
    b.basis = "{r^k, r^-k}";
  }
  return b;
}

enum class BoundaryCondition { dirichlet, neumann };

/// Mode-k eigenvalue on 𝔻∖𝔻_ε with the inner circle clamped (Dirichlet) or
/// free (Neumann): k(1±ε^{2k})/(1∓ε^{2k}).
inline double annulus_split_eigenvalue(double eps, int k, BoundaryCondition bc) {
  check_modulus(eps, "annulus_split_eigenvalue");
  if (k < 1) throw std::invalid_argument("annulus_split_eigenvalue: k must be positive");
  const double t = std::pow(eps, 2 * k);
  return bc == BoundaryCondition::dirichlet ? k * (1.0 + t) / (1.0 - t) : k * (1.0 - t) / (1.0 + t);
}

/// DtN symbol of the Möbius band on its boundary circle: odd modes see the
/// Dirichlet split of 𝔻∖𝔻_ε, even modes the Neumann split.
inline double moebius_symbol(double eps, int k) {
  if (k == 0) return 0.0;
  return annulus_split_eigenvalue(eps, k, k % 2 == 1 ? BoundaryCondition::dirichlet : BoundaryCondition::neumann);
}

namespace detail {

// Collects modes until `lower_bound(k)` exceeds the count-th smallest value.
template <typename ModeValues, typename LowerBound>
std::vector<double> collect_modes(int count, ModeValues&& mode_values, LowerBound&& lower_bound) {
  std::vector<double> v = mode_values(0);
  for (int k = 1;; ++k) {
    std::sort(v.begin(), v.end());
    if (int(v.size()) >= count && lower_bound(k) > v[std::size_t(count - 1)]) break;
    const auto m = mode_values(k);
    v.insert(v.end(), m.begin(), m.end());
  }
  std::sort(v.begin(), v.end());
  v.resize(static_cast<std::size_t>(count));
  return v;
}

}  // namespace detail

/// First `count` eigenvalues (σ_0 = 0 included) of the Möbius band with unit weight.
inline Spectrum moebius_uniform_spectrum(double eps, int count) {
  check_modulus(eps, "moebius_uniform_spectrum");
  const double e2 = eps * eps;
  auto values = detail::collect_modes(
      count,
      [eps](int k) {
        if (k == 0) return std::vector<double>{0.0};
        const double s = moebius_symbol(eps, k);
        return std::vector<double>{s, s};
      },
      [e2](int k) { return k * (1.0 - e2) / (1.0 + e2); });
  return Spectrum::from_values(std::move(values), two_pi);
}

/// Generalized eigenvalues of a 2×2 symmetric block against diag(m0, m1).
inline std::pair<double, double> eig2(const Eigen::Matrix2d& s, double m0, double m1) {
  const double a = s(0, 0) / m0, d = s(1, 1) / m1, b2 = s(0, 1) * s(0, 1) / (m0 * m1);
  const double h = 0.5 * (a + d), r = std::sqrt(0.25 * (a - d) * (a - d) + b2);
  const double hi = h + r;
  // Product form avoids cancellation in the small root.
  const double lo = hi > 0.0 ? (a * d - b2) / hi : h - r;
  return {lo, hi};
}

/// First `count` eigenvalues of 𝔻∖𝔻_ρ with unit weight on both circles
/// (boundary measure dθ outside, ρ dθ inside).
inline Spectrum flat_annulus_uniform_spectrum(double rho, int count) {
  check_modulus(rho, "flat_annulus_uniform_spectrum");
  auto values = detail::collect_modes(
      count,
      [rho](int k) {
        const Eigen::Matrix2d s = annulus_mode_block(rho, k).stiffness;
        const double m = (k == 0 ? two_pi : pi);
        auto [lo, hi] = eig2(s, m, m * rho);
        if (k == 0) return std::vector<double>{0.0, hi};
        return std::vector<double>{lo, lo, hi, hi};
      },
      [rho](int k) { return k * (1.0 - rho) / (1.0 + rho); });
  return Spectrum::from_values(std::move(values), two_pi * (1.0 + rho));
}

}  // namespace steklov

#endif
