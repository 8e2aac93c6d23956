#ifndef STEKLOV_WEIGHTED_EIG_HPP
#define STEKLOV_WEIGHTED_EIG_HPP

// Rayleigh–Ritz discretization of the weighted Steklov problem K u = σ M(β) u
// on the degree-N trace space of the disk, the flat annulus and the Möbius band.

#include "steklov/domain.hpp"
#include "steklov/exact_dtn.hpp"
#include "steklov/functionals.hpp"
#include "steklov/spectrum.hpp"
#include "steklov/trig.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace steklov {

struct AssembledProblem {
  DomainSpec domain;
  int degree = 0;
  Eigen::MatrixXd K;
  Eigen::MatrixXd M;
  Eigen::VectorXd constant;  // trace of the constant function
  double weighted_length = 0.0;
  // Invariant index sets; one set covering everything when β has no symmetry.
  std::vector<std::vector<int>> blocks;

  int circles() const { return domain.boundary_count(); }
  int dim() const { return static_cast<int>(K.rows()); }
};

namespace detail {

inline void require_flat(const DomainSpec& d) {
  if (d.kind == DomainSpec::Kind::curve)
    throw std::invalid_argument("assemble: smooth curves are handled by the boundary integral solver");
}

// Even weights decouple cos (with constants) from sin traces.
inline std::vector<std::vector<int>> parity_blocks(int n, int circles, bool even) {
  const int d = basis_dim(n);
  std::vector<std::vector<int>> blocks;
  if (!even) {
    std::vector<int> all(std::size_t(d * circles));
    std::iota(all.begin(), all.end(), 0);
    blocks.push_back(std::move(all));
    return blocks;
  }
  std::vector<int> c, s;
  for (int b = 0; b < circles; ++b) {
    for (int i = 0; i <= n; ++i) c.push_back(b * d + i);
    for (int i = n + 1; i < d; ++i) s.push_back(b * d + i);
  }
  blocks.push_back(std::move(c));
  if (!s.empty()) blocks.push_back(std::move(s));
  return blocks;
}

}  // namespace detail

/// Builds (K, M) for the given weight. For the annulus, circle 1 is |z| = ρ
/// and its mass carries the arclength factor ρ.
inline AssembledProblem assemble(const DomainSpec& domain, const BoundaryWeight& beta, int n) {
  detail::require_flat(domain);
  const int circles = domain.boundary_count();
  if (int(beta.size()) != circles) throw std::invalid_argument("assemble: one weight component per boundary circle");
  if (n < 1) throw std::invalid_argument("assemble: degree must be positive");
  const int d = basis_dim(n);

  AssembledProblem p;
  p.domain = domain;
  p.degree = n;
  p.K = Eigen::MatrixXd::Zero(d * circles, d * circles);
  p.M = Eigen::MatrixXd::Zero(d * circles, d * circles);
  p.constant = Eigen::VectorXd::Zero(d * circles);

  for (int b = 0; b < circles; ++b) {
    const TrigPolynomial w = beta.direct(std::size_t(b), 2 * n);
    const double scale = domain.circle_scale(b);
    p.M.block(b * d, b * d, d, d) = scale * toeplitz_mass_matrix(w, n);
    p.weighted_length += scale * two_pi * w.a0;
    p.constant(b * d) = 1.0;
  }

  switch (domain.kind) {
    case DomainSpec::Kind::disk:
      for (int i = 0; i < d; ++i) p.K(i, i) = pi * basis_frequency(i, n);
      break;
    case DomainSpec::Kind::moebius:
      for (int i = 0; i < d; ++i) p.K(i, i) = pi * moebius_symbol(domain.parameter, basis_frequency(i, n));
      break;
    case DomainSpec::Kind::annulus:
      for (int i = 0; i < d; ++i) {
        const int k = basis_frequency(i, n);
        Eigen::MatrixXd s = annulus_mode_block(domain.parameter, k).stiffness;
        // The k = 0 block is written for the constant trace 1, the others for cos kθ.
        p.K(i, i) = s(0, 0);
        p.K(d + i, d + i) = s(1, 1);
        p.K(i, d + i) = s(0, 1);
        p.K(d + i, i) = s(1, 0);
      }
      break;
    case DomainSpec::Kind::curve: break;
  }
  p.blocks = detail::parity_blocks(n, circles, beta.is_even());
  return p;
}

namespace detail {

struct BlockSolution {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // columns in block coordinates
};

// Smallest `count` eigenpairs of (A, B) via LAPACK dsygvx; A and B are consumed.
inline BlockSolution sygvx(Eigen::MatrixXd A, Eigen::MatrixXd B, int count, bool vectors) {
  const int n = static_cast<int>(A.rows());
  count = std::min(count, n);
  BlockSolution out;
  if (count <= 0) return out;
  std::vector<double> w(static_cast<std::size_t>(n));
  Eigen::MatrixXd Z(n, vectors ? count : 1);
  std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
  lapack_int m = 0;
  const double abstol = 2.0 * std::numeric_limits<double>::min();
  const lapack_int info = LAPACKE_dsygvx(LAPACK_COL_MAJOR, 1, vectors ? 'V' : 'N', 'I', 'U', n, A.data(), n, B.data(), n,
                                         0.0, 0.0, 1, count, abstol, &m, w.data(), Z.data(), n, ifail.data());
  if (info > n) throw std::runtime_error("solve: mass matrix is not positive definite (weight not positive or aliased)");
  if (info != 0) throw std::runtime_error("solve: LAPACK dsygvx failed with info " + std::to_string(info));
  out.values.assign(w.begin(), w.begin() + m);
  if (vectors) out.vectors = Z.leftCols(m);
  return out;
}

}  // namespace detail

struct SolveOptions {
  enum class Method { automatic, dense, iterative };
  bool keep_traces = false;
  double cluster_tolerance = default_cluster_tolerance;
  double residual_tolerance = 1e-10;
  Method method = Method::automatic;
  int dense_limit = 600;  // automatic: dense LAPACK up to this total dimension
};

/// Smallest `count` eigenvalues, σ_0 = 0 pinned by deflating the constants.
/// Kept traces are M-normalized (∫ φ² β dL = 1).
inline Spectrum solve(const AssembledProblem& p, int count, const SolveOptions& opt = {}) {
  if (count < 1 || count > p.dim()) throw std::invalid_argument("solve: count must lie in [1, dim]");
  struct Pair {
    double value;
    Eigen::VectorXd vec;
  };
  std::vector<Pair> pairs;
  pairs.push_back({0.0, opt.keep_traces ? Eigen::VectorXd(p.constant / std::sqrt(p.weighted_length)) : Eigen::VectorXd()});

  for (const auto& idx : p.blocks) {
    const int b = static_cast<int>(idx.size());
    Eigen::MatrixXd Kb(b, b), Mb(b, b);
    Eigen::VectorXd cb(b);
    for (int i = 0; i < b; ++i) {
      cb(i) = p.constant(idx[i]);
      for (int j = 0; j < b; ++j) {
        Kb(i, j) = p.K(idx[i], idx[j]);
        Mb(i, j) = p.M(idx[i], idx[j]);
      }
    }
    const bool has_constant = cb.squaredNorm() > 0.0;
    Eigen::VectorXd h;
    if (has_constant) {
      // Householder reflection H with H e_0 ∝ M c; columns 1.. of H span the
      // M-orthogonal complement of the constants.
      Eigen::VectorXd v = Mb * cb;
      h = v;
      h(0) += (v(0) >= 0.0 ? 1.0 : -1.0) * v.norm();
      h /= h.norm();
      auto reflect = [&h](Eigen::MatrixXd& A) {
        const Eigen::VectorXd Ah = A * h;
        const double hAh = h.dot(Ah);
        A -= 2.0 * (Ah * h.transpose() + h * Ah.transpose());
        A += 4.0 * hAh * h * h.transpose();
      };
      reflect(Kb);
      reflect(Mb);
      Kb = Kb.bottomRightCorner(b - 1, b - 1).eval();
      Mb = Mb.bottomRightCorner(b - 1, b - 1).eval();
    }
    const int want = std::min<int>(has_constant ? count - 1 : count, static_cast<int>(Kb.rows()));
    auto sol = detail::sygvx(std::move(Kb), std::move(Mb), want, opt.keep_traces);
    for (std::size_t j = 0; j < sol.values.size(); ++j) {
      Eigen::VectorXd full;
      if (opt.keep_traces) {
        Eigen::VectorXd y(b);
        if (has_constant) {
          y(0) = 0.0;
          y.tail(b - 1) = sol.vectors.col(Eigen::Index(j));
          y -= 2.0 * h.dot(y) * h;
        } else {
          y = sol.vectors.col(Eigen::Index(j));
        }
        full = Eigen::VectorXd::Zero(p.dim());
        for (int i = 0; i < b; ++i) full(idx[i]) = y(i);
      }
      pairs.push_back({sol.values[j], std::move(full)});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.value < b.value; });
  if (int(pairs.size()) < count) throw std::runtime_error("solve: fewer eigenpairs than requested");
  pairs.resize(static_cast<std::size_t>(count));

  Spectrum s;
  s.weighted_length = p.weighted_length;
  s.multiplicity_tolerance = opt.cluster_tolerance;
  for (const auto& q : pairs) s.eigenvalues.push_back(q.value);
  if (opt.keep_traces) {
    Eigen::MatrixXd T(p.dim(), count);
    for (int k = 0; k < count; ++k) T.col(k) = pairs[std::size_t(k)].vec;
    s.traces = std::move(T);
  }
  s.finalize();
  return s;
}

/// max_k ‖K u_k − σ_k M u_k‖ / ((‖K‖ + σ_k ‖M‖) ‖u_k‖), Frobenius norms.
inline double relative_residual(const AssembledProblem& p, const Spectrum& s) {
  if (!s.traces) throw std::invalid_argument("relative_residual: traces were not kept");
  const double nk = p.K.norm(), nm = p.M.norm();
  double worst = 0.0;
  for (int k = 0; k < s.size(); ++k) {
    const Eigen::VectorXd u = s.traces->col(k);
    const double sig = s.eigenvalues[std::size_t(k)];
    const double r = (p.K * u - sig * (p.M * u)).norm() / ((nk + sig * nm) * u.norm());
    worst = std::max(worst, r);
  }
  return worst;
}

namespace detail {

// K restricted to the pair of basis functions with index i on the two circles
// (annulus), or the 1×1 diagonal entry.
inline Eigen::Matrix2d stiffness_pair(const DomainSpec& d, int i, int n) {
  const int k = basis_frequency(i, n);
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  switch (d.kind) {
    case DomainSpec::Kind::disk: s(0, 0) = pi * k; break;
    case DomainSpec::Kind::moebius: s(0, 0) = pi * moebius_symbol(d.parameter, k); break;
    case DomainSpec::Kind::annulus: s = annulus_mode_block(d.parameter, k).stiffness; break;
    case DomainSpec::Kind::curve: break;
  }
  return s;
}

// Matrix-free pencil (K, M): K through its 2×2 mode blocks, M through FFT
// products with the sampled weight.
struct PencilOperator {
  DomainSpec domain;
  int n = 0, circles = 1, d = 0, m = 0;
  std::vector<std::vector<double>> beta;  // scale · β at m nodes per circle
  std::vector<Eigen::Matrix2d> k_inv_sqrt;  // pseudo-inverse square roots per index
  Eigen::VectorXd c, Mc;
  double length = 0.0;

  PencilOperator(const DomainSpec& dom, const BoundaryWeight& w, int degree) : domain(dom), n(degree) {
    circles = dom.boundary_count();
    d = basis_dim(n);
    m = fft_size(4 * n + 2);
    for (int b = 0; b < circles; ++b) {
      const TrigPolynomial p = w.direct(std::size_t(b), 2 * n);
      if (!(min_on_grid(p, std::max(4096, m)) > positivity_margin)) throw std::domain_error("solve: weight is not positive");
      auto v = samples(p, m);
      for (auto& x : v) x *= dom.circle_scale(b);
      beta.push_back(std::move(v));
      length += dom.circle_scale(b) * two_pi * p.a0;
    }
    for (int i = 0; i < d; ++i) {
      const Eigen::Matrix2d s = stiffness_pair(dom, i, n);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s);
      const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1.0);
      Eigen::Vector2d l;
      for (int j = 0; j < 2; ++j) l(j) = es.eigenvalues()(j) > 1e-13 * top ? 1.0 / std::sqrt(es.eigenvalues()(j)) : 0.0;
      k_inv_sqrt.push_back(es.eigenvectors() * l.asDiagonal() * es.eigenvectors().transpose());
    }
    c = Eigen::VectorXd::Zero(d * circles);
    for (int b = 0; b < circles; ++b) c(b * d) = 1.0;
    Mc = mass(c);
  }

  int dim() const { return d * circles; }

  Eigen::VectorXd mass(const Eigen::VectorXd& u) const {
    Eigen::VectorXd out(dim());
    const double h = two_pi / m;
    for (int b = 0; b < circles; ++b) {
      TrigPolynomial t(n);
      t.a0 = u(b * d);
      for (int k = 1; k <= n; ++k) {
        t.cos[std::size_t(k - 1)] = u(b * d + k);
        t.sin[std::size_t(k - 1)] = u(b * d + n + k);
      }
      auto v = samples(t, m);
      for (int j = 0; j < m; ++j) v[std::size_t(j)] *= beta[std::size_t(b)][std::size_t(j)];
      const auto F = rfft(v);
      out(b * d) = h * F[0].real();
      for (int k = 1; k <= n; ++k) {
        out(b * d + k) = h * F[std::size_t(k)].real();
        out(b * d + n + k) = -h * F[std::size_t(k)].imag();
      }
    }
    return out;
  }

  Eigen::VectorXd k_inv_sqrt_apply(const Eigen::VectorXd& y) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    for (int i = 0; i < d; ++i) {
      const auto& s = k_inv_sqrt[std::size_t(i)];
      if (circles == 1) {
        out(i) = s(0, 0) * y(i);
      } else {
        out(i) = s(0, 0) * y(i) + s(0, 1) * y(d + i);
        out(d + i) = s(1, 0) * y(i) + s(1, 1) * y(d + i);
      }
    }
    return out;
  }

  // Q = I − c cᵀM / L removes the constant M-orthogonally.
  Eigen::VectorXd q(const Eigen::VectorXd& v) const { return v - c * (Mc.dot(v) / length); }
  Eigen::VectorXd qt(const Eigen::VectorXd& w) const { return w - Mc * (c.dot(w) / length); }

  /// A = K^{+1/2} Qᵀ M Q K^{+1/2}; its eigenvalues are 1/σ.
  Eigen::VectorXd apply(const Eigen::VectorXd& y) const { return k_inv_sqrt_apply(qt(mass(q(k_inv_sqrt_apply(y))))); }

  /// M-normalized trace for a unit eigenvector y of A with eigenvalue μ.
  Eigen::VectorXd trace(const Eigen::VectorXd& y, double mu) const { return q(k_inv_sqrt_apply(y)) / std::sqrt(mu); }
};

}  // namespace detail

/// Matrix-free solver: subspace iteration with Rayleigh–Ritz on A, whose top
/// eigenvalues are 1/σ_1 ≥ 1/σ_2 ≥ …; cost per sweep is a few FFTs per vector.
inline Spectrum solve_iterative(const DomainSpec& domain, const BoundaryWeight& beta, int n, int count, const SolveOptions& opt = {}) {
  detail::require_flat(domain);
  if (int(beta.size()) != domain.boundary_count()) throw std::invalid_argument("solve: one weight component per boundary circle");
  const detail::PencilOperator A(domain, beta, n);
  if (count < 1 || count > A.dim()) throw std::invalid_argument("solve: count must lie in [1, dim]");
  const int want = count - 1;
  Spectrum s;
  s.weighted_length = A.length;
  s.multiplicity_tolerance = opt.cluster_tolerance;
  s.eigenvalues.push_back(0.0);
  Eigen::MatrixXd T;
  if (opt.keep_traces) {
    T.resize(A.dim(), count);
    T.col(0) = A.c / std::sqrt(A.length);
  }
  if (want > 0) {
    const int p = std::min(A.dim() - domain.boundary_count(), std::max(2 * want, want + 16));
    if (p < want) throw std::invalid_argument("solve: degree too small for count");
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd Y(A.dim(), p), W(A.dim(), p);
    for (int j = 0; j < p; ++j)
      for (int i = 0; i < A.dim(); ++i) Y(i, j) = normal(rng);
    for (int j = 0; j < p; ++j) W.col(j) = A.apply(Y.col(j));
    Eigen::VectorXd mu;
    bool done = false;
    for (int sweep = 0; sweep < 5000 && !done; ++sweep) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(W);
      Y = qr.householderQ() * Eigen::MatrixXd::Identity(A.dim(), p);
      for (int j = 0; j < p; ++j) W.col(j) = A.apply(Y.col(j));
      Eigen::MatrixXd H = Y.transpose() * W;
      H = 0.5 * (H + H.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
      // Descending order of μ.
      const Eigen::MatrixXd V = es.eigenvectors().rowwise().reverse();
      mu = es.eigenvalues().reverse();
      Y = Y * V;
      W = W * V;
      done = true;
      for (int j = 0; j < want && done; ++j)
        if ((W.col(j) - mu(j) * Y.col(j)).norm() > 1e-12 * mu(j)) done = false;
    }
    if (!done) throw std::runtime_error("solve: subspace iteration did not converge");
    for (int j = 0; j < want; ++j) {
      s.eigenvalues.push_back(1.0 / mu(j));
      if (opt.keep_traces) T.col(j + 1) = A.trace(Y.col(j), mu(j));
    }
  }
  if (opt.keep_traces) s.traces = std::move(T);
  s.finalize();
  return s;
}

inline bool use_iterative(const DomainSpec& domain, int n, const SolveOptions& opt) {
  if (opt.method != SolveOptions::Method::automatic) return opt.method == SolveOptions::Method::iterative;
  return basis_dim(n) * domain.boundary_count() > opt.dense_limit;
}

inline Spectrum weighted_spectrum(const DomainSpec& domain, const BoundaryWeight& beta, int n, int count,
                                  const SolveOptions& opt = {}) {
  if (use_iterative(domain, n, opt)) return solve_iterative(domain, beta, n, count, opt);
  return solve(assemble(domain, beta, n), count, opt);
}

/// Trace on boundary circle `circle` of a coefficient vector as a polynomial.
inline TrigPolynomial trace_polynomial(const Eigen::VectorXd& u, int n, int circle = 0) {
  const int off = circle * basis_dim(n);
  TrigPolynomial t(n);
  t.a0 = u(off);
  for (int k = 1; k <= n; ++k) {
    t.cos[k - 1] = u(off + k);
    t.sin[k - 1] = u(off + n + k);
  }
  return t;
}

/// Boundary quadrature of the kept traces on m nodes per circle, for the
/// criticality check; rows run over circles then nodes.
inline BoundarySamples flat_boundary_samples(const DomainSpec& domain, int n, const BoundaryWeight& beta, const Spectrum& s, int m = 0) {
  if (!s.traces) throw std::invalid_argument("flat_boundary_samples: traces were not kept");
  const int c = domain.boundary_count();
  if (m <= 0) m = fft_size(8 * n + 2);
  BoundarySamples b{Eigen::VectorXd(c * m), Eigen::MatrixXd(c * m, s.size())};
  for (int circle = 0; circle < c; ++circle) {
    const auto w = samples(beta.direct(std::size_t(circle), 2 * n), m);
    const double scale = domain.circle_scale(circle) * two_pi / m;
    for (int j = 0; j < m; ++j) b.measure(circle * m + j) = scale * w[std::size_t(j)];
    for (int k = 0; k < s.size(); ++k) {
      const auto v = samples(trace_polynomial(s.traces->col(k), n, circle), m);
      for (int j = 0; j < m; ++j) b.values(circle * m + j, k) = v[std::size_t(j)];
    }
  }
  return b;
}

struct ConvergenceRow {
  int degree = 0;
  std::vector<double> eigenvalues;
  std::vector<double> normalized;
  std::vector<double> change;  // |σ_k(N) − σ_k(previous N)|, empty for the first row
  double digits = 0.0;         // −log10 of the largest relative change
};

/// Eigenvalues for increasing degrees; Rayleigh–Ritz makes each σ_k nonincreasing.
inline std::vector<ConvergenceRow> convergence_study(const DomainSpec& domain, const BoundaryWeight& beta, int count,
                                                     const std::vector<int>& degrees) {
  if (!std::is_sorted(degrees.begin(), degrees.end())) throw std::invalid_argument("convergence_study: degrees must increase");
  std::vector<ConvergenceRow> rows;
  for (int n : degrees) {
    const Spectrum s = weighted_spectrum(domain, beta, n, count);
    ConvergenceRow r{n, s.eigenvalues, s.normalized, {}, std::numeric_limits<double>::infinity()};
    if (!rows.empty()) {
      double worst = 0.0;
      for (int k = 0; k < count; ++k) {
        const double c = std::abs(r.eigenvalues[std::size_t(k)] - rows.back().eigenvalues[std::size_t(k)]);
        r.change.push_back(c);
        if (k > 0) worst = std::max(worst, c / std::abs(r.eigenvalues[std::size_t(k)]));
      }
      r.digits = worst > 0.0 ? -std::log10(worst) : std::numeric_limits<double>::infinity();
    } else {
      r.digits = 0.0;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace steklov

#endif
