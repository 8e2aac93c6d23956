#ifndef STEKLOV_DEGENERATION_HPP
#define STEKLOV_DEGENERATION_HPP

// Weights on the disk that concentrate Cauchy bumps at boundary points, the
// disjoint unions they approach, and the convergence experiment between them.

#include "steklov/domain.hpp"
#include "steklov/spectrum.hpp"
#include "steklov/trig.hpp"
#include "steklov/weighted_eig.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace steklov {

struct WeightedDomain {
  DomainSpec domain;
  BoundaryWeight weight;
};

/// Base surface (absent when β_0 = 0) with disks attached at boundary angles.
struct DisjointUnionSpec {
  std::optional<WeightedDomain> base;
  std::vector<TrigPolynomial> attached_disks;  // weight on 𝕊¹ of each attached disk
  std::vector<double> attachment_points;

  void validate() const {
    if (!base && attached_disks.empty()) throw std::invalid_argument("union: no component");
    if (base && attachment_points.size() != attached_disks.size())
      throw std::invalid_argument("union: one attachment point per attached disk");
    for (std::size_t i = 0; i < attachment_points.size(); ++i)
      for (std::size_t j = i + 1; j < attachment_points.size(); ++j)
        if (std::abs(std::remainder(attachment_points[i] - attachment_points[j], two_pi)) < 1e-12)
          throw std::invalid_argument("union: attachment points must be distinct");
  }

  static DisjointUnionSpec disk_with_unit_disks(int count) {
    DisjointUnionSpec s;
    s.base = WeightedDomain{DomainSpec::disk(), BoundaryWeight::uniform(1)};
    for (int i = 0; i < count; ++i) {
      s.attached_disks.push_back(TrigPolynomial::constant(1.0));
      s.attachment_points.push_back(two_pi * i / count);
    }
    return s;
  }
};

/// Merged spectrum of all components, normalized by the total weighted length.
inline Spectrum union_spectrum(const DisjointUnionSpec& spec, int count, int degree = 32) {
  spec.validate();
  std::vector<double> values;
  double length = 0.0;
  auto add = [&](const DomainSpec& d, const BoundaryWeight& w) {
    const Spectrum s = weighted_spectrum(d, w, degree, std::min(count, basis_dim(degree) * d.boundary_count()));
    values.insert(values.end(), s.eigenvalues.begin(), s.eigenvalues.end());
    length += s.weighted_length;
  };
  if (spec.base) add(spec.base->domain, spec.base->weight);
  for (const auto& w : spec.attached_disks) add(DomainSpec::disk(), BoundaryWeight{{w}, BoundaryWeight::Representation::direct});
  std::sort(values.begin(), values.end());
  if (int(values.size()) < count) throw std::invalid_argument("union_spectrum: degree too small for count");
  values.resize(std::size_t(count));
  return Spectrum::from_values(std::move(values), length);
}

/// ζ(z) = i(1 − z)/(1 + z) maps 𝔻 to the upper half-plane with ζ(1) = 0,
/// ζ(−1) = ∞, ζ(0) = i; on ℝ its inverse is the boundary angle 2 arctan s.
inline double zeta_inverse_angle(double s) { return 2.0 * std::atan(s); }

/// Unperiodized bump kernel 2ε/(ε² + s²).
inline double cauchy_kernel(double s, double eps) { return 2.0 * eps / (eps * eps + s * s); }

/// Σ_n 2ε/(ε² + (x + 2πn)²) = sinh ε/(cosh ε − cos x).
inline double periodized_cauchy(double x, double eps) { return std::sinh(eps) / (std::cosh(eps) - std::cos(x)); }

/// Degree of the projected bump: ⌈40/ε⌉, capped at 8000.
inline int bump_degree(double eps) { return std::min(8000, int(std::ceil(40.0 / eps))); }

struct DegeneratingWeight {
  TrigPolynomial beta;
  double tail = 0.0;  // largest coefficient magnitude in the top tenth of the degree
};

/// β_0 plus, for each attached disk i, s ↦ β_i(ζ^{-1}(s/ε)) 2ε/(ε² + s²) in the
/// arclength chart at p_i, summed over 2π-translates.
inline DegeneratingWeight make_degenerating_weight(const DisjointUnionSpec& spec, double eps, int degree = 0) {
  spec.validate();
  if (spec.base && spec.base->domain.kind != DomainSpec::Kind::disk)
    throw std::invalid_argument("make_degenerating_weight: only the disk base is implemented");
  if (!(eps > 0.0)) throw std::invalid_argument("make_degenerating_weight: eps must be positive");
  double sep = two_pi;
  const auto& pts = spec.attachment_points;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) sep = std::min(sep, std::abs(std::remainder(pts[i] - pts[j], two_pi)));
  // Overlap of two bumps at mid-separation relative to their peaks.
  if (pts.size() > 1 && cauchy_kernel(0.5 * sep, eps) > 0.05 * cauchy_kernel(0.0, eps))
    throw std::invalid_argument("make_degenerating_weight: eps too large for the attachment separation");
  if (degree <= 0) degree = bump_degree(eps);

  DegeneratingWeight out;
  TrigPolynomial beta(degree);
  if (spec.base) beta = spec.base->weight.direct(0, degree);
  const double r = std::exp(-eps);
  for (std::size_t i = 0; i < spec.attached_disks.size(); ++i) {
    const TrigPolynomial& bi = spec.attached_disks[i];
    const double p = pts.empty() ? 0.0 : pts[i];
    TrigPolynomial bump(degree);
    if (bi.degree() == 0) {
      // Constant β_i: the periodized bump is β_i times the Poisson kernel P_r.
      bump.a0 = bi.a0;
      for (int k = 1; k <= degree; ++k) {
        const double a = 2.0 * bi.a0 * std::pow(r, k);
        bump.cos[k - 1] = a * std::cos(k * p);
        bump.sin[k - 1] = a * std::sin(k * p);
      }
    } else {
      // Far translates through β_i(π) P_r; the correction for the near ones
      // is tapered smoothly between |s| = R and 2R so the sum stays periodic.
      const int m = fft_size(std::max(4 * degree + 2, 1024));
      const double far = bi(pi), R = 8.0 * two_pi;
      auto h = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
      auto taper = [&](double y) {
        const double t = (std::abs(y) - R) / R;
        return t <= 0.0 ? 1.0 : (t >= 1.0 ? 0.0 : h(1.0 - t) / (h(t) + h(1.0 - t)));
      };
      std::vector<double> v(static_cast<std::size_t>(m));
      const auto th = nodes(m);
      for (int j = 0; j < m; ++j) {
        const double x = std::remainder(th[std::size_t(j)] - p, two_pi);
        double s = far * periodized_cauchy(x, eps);
        for (int n = -17; n <= 17; ++n) {
          const double y = x + two_pi * n;
          const double c = taper(y);
          if (c > 0.0) s += c * (bi(zeta_inverse_angle(y / eps)) - far) * cauchy_kernel(y, eps);
        }
        v[std::size_t(j)] = s;
      }
      bump = fourier_of_samples(v, degree);
    }
    beta = beta + bump;
  }
  for (int k = std::max(1, degree - degree / 10); k <= degree; ++k)
    out.tail = std::max({out.tail, std::abs(beta.cos[k - 1]), std::abs(beta.sin[k - 1])});
  out.beta = std::move(beta);
  return out;
}

struct DegenerationRow {
  double eps = 0.0;
  int degree = 0;
  std::vector<double> weighted;  // σ̄_k(𝔻, β_ε), k = 0..m
  std::vector<double> target;    // σ̄_k of the union
  std::vector<double> error;
  double mass = 0.0;
};

struct DegenerationResult {
  std::vector<DegenerationRow> rows;
  std::vector<double> trend;       // least-squares C_k in error ≈ C_k / ln(1/ε)
  std::vector<double> trend_spread;  // max/min of error·ln(1/ε) over the grid
};

/// σ̄_k(𝔻, β_ε) against σ̄_k of the union for each ε. Trace degree ⌈20/ε⌉
/// (half the bump degree), capped at `max_degree`.
inline DegenerationResult degeneration_experiment(const DisjointUnionSpec& spec, const std::vector<double>& eps_list, int m,
                                                  int max_degree = 4000, double tail_tolerance = 1e-12) {
  DegenerationResult res;
  const Spectrum target = union_spectrum(spec, m + 1);
  for (double eps : eps_list) {
    const int n = std::min(max_degree, int(std::ceil(20.0 / eps)));
    const auto w = make_degenerating_weight(spec, eps, 2 * n);
    if (w.tail > tail_tolerance * w.beta.a0)
      throw std::runtime_error("degeneration_experiment: Fourier degree too small for the bump at eps = " + std::to_string(eps));
    const BoundaryWeight bw{{w.beta}, BoundaryWeight::Representation::direct};
    const Spectrum s = weighted_spectrum(DomainSpec::disk(), bw, n, m + 1);
    DegenerationRow row{eps, n, s.normalized, target.normalized, {}, s.weighted_length};
    for (int k = 0; k <= m; ++k) row.error.push_back(std::abs(s.normalized[std::size_t(k)] - target.normalized[std::size_t(k)]));
    res.rows.push_back(std::move(row));
  }
  for (int k = 0; k <= m; ++k) {
    double num = 0.0, den = 0.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : res.rows) {
      const double x = 1.0 / std::log(1.0 / r.eps);
      num += x * r.error[std::size_t(k)];
      den += x * x;
      const double c = r.error[std::size_t(k)] / x;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    res.trend.push_back(den > 0.0 ? num / den : 0.0);
    res.trend_spread.push_back(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
  }
  return res;
}

/// Lower bound exp(−2π/l) on the modulus parameter of the disk with a handle
/// of conformal length l.
inline double modulus_lower_bound(double l) {
  if (!(l > 0.0)) throw std::invalid_argument("modulus_lower_bound: l must be positive");
  return std::exp(-two_pi / l);
}

}  // namespace steklov

#endif
