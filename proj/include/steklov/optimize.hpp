#ifndef STEKLOV_OPTIMIZE_HPP
#define STEKLOV_OPTIMIZE_HPP

// Nonsmooth ascent over boundary weights β = β_seed · exp(w), w a
// trigonometric polynomial per circle, for σ̄_k and for spectral functionals.

#include "steklov/domain.hpp"
#include "steklov/exact_dtn.hpp"
#include "steklov/functionals.hpp"
#include "steklov/spectrum.hpp"
#include "steklov/trig.hpp"
#include "steklov/weighted_eig.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace steklov {

// ---------------------------------------------------------------------------
// First variation of σ̄_k under β ↦ β exp(tδ).

/// Cluster of σ̄_k with its first-variation generators: the cluster
/// eigenvalues move to first order as the eigenvalues of the matrix
/// (Σ_c ∫ h_ab,c δ_c dθ)_ab.
struct EigenvalueGradient {
  Cluster cluster;
  double sigma = 0.0;
  // generators[a][b][c] = h_ab on circle c.
  std::vector<std::vector<std::vector<TrigPolynomial>>> generators;

  bool simple() const { return cluster.size() == 1; }
  const std::vector<TrigPolynomial>& gradient() const { return generators[0][0]; }

  Eigen::MatrixXd matrix(const std::vector<TrigPolynomial>& delta) const {
    const int s = cluster.size();
    Eigen::MatrixXd G(s, s);
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) {
        double v = 0.0;
        for (std::size_t c = 0; c < delta.size(); ++c) v += pairing(generators[std::size_t(a)][std::size_t(b)][c], delta[c]);
        G(a, b) = v;
      }
    return G;
  }

  /// dσ̄_k[δ] for a simple eigenvalue.
  double directional(const std::vector<TrigPolynomial>& delta) const {
    if (!simple()) throw std::logic_error("directional: eigenvalue is multiple, use matrix()");
    return matrix(delta)(0, 0);
  }

  /// ∫_0^{2π} h δ dθ.
  static double pairing(const TrigPolynomial& h, const TrigPolynomial& d) {
    double v = two_pi * h.a0 * d.a0;
    for (int k = 1; k <= std::min(h.degree(), d.degree()); ++k) v += pi * (h.cos[k - 1] * d.cos[k - 1] + h.sin[k - 1] * d.sin[k - 1]);
    return v;
  }
};

/// h_ab = σ ρ_c β (δ_ab − L φ_a φ_b) on each circle c, with ∫ φ_a φ_b β dL = δ_ab
/// and ρ_c the arclength factor of circle c.
inline EigenvalueGradient eigenvalue_gradient(const DomainSpec& domain, const BoundaryWeight& beta, int n, int k,
                                              double cluster_tolerance = default_cluster_tolerance) {
  if (k < 1) throw std::invalid_argument("eigenvalue_gradient: k must be positive");
  const int dim = basis_dim(n) * domain.boundary_count();
  int count = k + 2;
  Spectrum s;
  for (;;) {
    SolveOptions so;
    so.keep_traces = true;
    so.cluster_tolerance = cluster_tolerance;
    s = weighted_spectrum(domain, beta, n, std::min(count, dim), so);
    if (s.cluster_of(k).last < s.size() || s.size() == dim) break;
    count += 2;
  }
  EigenvalueGradient g;
  g.cluster = s.cluster_of(k);
  const int sz = g.cluster.size();
  for (int j = g.cluster.first; j < g.cluster.last; ++j) g.sigma += s.eigenvalues[std::size_t(j)] / sz;
  const int m = fft_size(8 * n + 2);
  const double L = s.weighted_length;
  g.generators.assign(std::size_t(sz), std::vector<std::vector<TrigPolynomial>>(std::size_t(sz)));
  for (int c = 0; c < domain.boundary_count(); ++c) {
    const auto w = samples(beta.direct(std::size_t(c), 2 * n), m);
    std::vector<std::vector<double>> phi;
    for (int j = g.cluster.first; j < g.cluster.last; ++j) phi.push_back(samples(trace_polynomial(s.traces->col(j), n, c), m));
    const double scale = g.sigma * domain.circle_scale(c);
    for (int a = 0; a < sz; ++a)
      for (int b = 0; b < sz; ++b) {
        std::vector<double> h(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j)
          h[std::size_t(j)] = scale * w[std::size_t(j)] * ((a == b ? 1.0 : 0.0) - L * phi[std::size_t(a)][std::size_t(j)] * phi[std::size_t(b)][std::size_t(j)]);
        g.generators[std::size_t(a)][std::size_t(b)].push_back(fourier_of_samples(h, 4 * n));
      }
  }
  return g;
}

/// β exp(tδ) as a direct weight of degree `degree`.
inline BoundaryWeight perturbed_weight(const BoundaryWeight& beta, const std::vector<TrigPolynomial>& delta, double t, int degree) {
  BoundaryWeight out;
  const int m = std::max(256, fft_size(4 * degree + 2));
  for (std::size_t c = 0; c < beta.size(); ++c) {
    auto v = beta.sampled(c, m);
    const auto d = samples(delta[c], m);
    for (int j = 0; j < m; ++j) v[std::size_t(j)] *= std::exp(t * d[std::size_t(j)]);
    out.components.push_back(fourier_of_samples(v, degree));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weight parametrization and seeds.

/// Handle profile: a unit-mass strip of conformal width w pulled back to each
/// boundary circle at θ = 0 (annulus, inner circle rescaled by 1/ρ) or at
/// θ = 0 and π (Möbius band), on top of a constant floor λ. The periodized
/// (π/w) sech(πθ/w) has Fourier coefficients 1/2, sech(kw/2).
inline BoundaryWeight handle_seed(const DomainSpec& domain, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("handle_seed: floor must be positive");
  double w;
  if (domain.kind == DomainSpec::Kind::annulus) {
    w = std::log(1.0 / domain.parameter);
  } else if (domain.kind == DomainSpec::Kind::moebius) {
    w = 2.0 * std::log(1.0 / domain.parameter);
  } else {
    throw std::invalid_argument("handle_seed: annulus or Möbius band only");
  }
  const int degree = std::max(8, int(std::ceil(2.0 * 38.0 / w)));  // sech(kw/2) < 1e-16 beyond
  TrigPolynomial p(degree);
  const bool moebius = domain.kind == DomainSpec::Kind::moebius;
  p.a0 = floor + (moebius ? 1.0 : 0.5);
  for (int k = 1; k <= degree; ++k) {
    const double c = 1.0 / std::cosh(0.5 * k * w);
    p.cos[std::size_t(k - 1)] = moebius ? (k % 2 == 0 ? 2.0 * c : 0.0) : c;
  }
  BoundaryWeight b;
  b.components.push_back(p);
  if (domain.kind == DomainSpec::Kind::annulus) b.components.push_back((1.0 / domain.parameter) * p);
  return b;
}

/// Trace degree at which β's coefficients beyond 2N fall under `tol` · a0.
inline int suggested_degree(const BoundaryWeight& beta, int floor, double tol = 1e-14) {
  int need = 0;
  for (std::size_t c = 0; c < beta.size(); ++c) {
    const TrigPolynomial d = beta.representation == BoundaryWeight::Representation::direct
                                 ? beta.components[c]
                                 : beta.direct(c, std::max(64, 8 * beta.components[c].degree()));
    for (int k = d.degree(); k >= 1; --k)
      if (std::hypot(d.cos[std::size_t(k - 1)], d.sin[std::size_t(k - 1)]) > tol * std::abs(d.a0)) {
        need = std::max(need, (k + 1) / 2);
        break;
      }
  }
  return std::max(floor, need);
}

/// β_c = seed_c · exp(w_c); the parameter vector holds the coefficients of
/// the w_c with a0 of circle 0 fixed at zero (the scale direction).
struct WeightModel {
  DomainSpec domain;
  BoundaryWeight seed;
  int modulation_degree = 16;

  int circles() const { return domain.boundary_count(); }
  int block() const { return basis_dim(modulation_degree); }
  int parameter_count() const { return circles() * block() - 1; }

  // Position of coefficient `i` (trace-basis index) of circle c, or −1.
  int index(int c, int i) const { return c == 0 ? (i == 0 ? -1 : i - 1) : c * block() - 1 + i; }

  TrigPolynomial modulation(const Eigen::VectorXd& p, int c) const {
    TrigPolynomial w(modulation_degree);
    const int d = modulation_degree;
    w.a0 = c == 0 ? 0.0 : p(index(c, 0));
    for (int k = 1; k <= d; ++k) {
      w.cos[std::size_t(k - 1)] = p(index(c, k));
      w.sin[std::size_t(k - 1)] = p(index(c, d + k));
    }
    return w;
  }

  int quadrature_nodes(int weight_degree) const {
    int seed_degree = 0;
    for (const auto& c : seed.components) seed_degree = std::max(seed_degree, c.degree());
    return fft_size(std::max({4 * weight_degree + 2, 2 * seed_degree + 2, 8 * modulation_degree, 256}));
  }

  /// Samples of seed · exp(w) on circle c at m nodes.
  std::vector<double> raw_samples(const Eigen::VectorXd& p, int c, int m) const {
    auto v = seed.sampled(std::size_t(c), m);
    const auto w = samples(modulation(p, c), m);
    for (int j = 0; j < m; ++j) v[std::size_t(j)] *= std::exp(w[std::size_t(j)]);
    return v;
  }

  /// Direct weight of degree 2n actually seen by the degree-n discretization.
  BoundaryWeight weight(const Eigen::VectorXd& p, int n) const {
    BoundaryWeight b;
    const int m = quadrature_nodes(2 * n);
    for (int c = 0; c < circles(); ++c) b.components.push_back(fourier_of_samples(raw_samples(p, c, m), 2 * n));
    return b;
  }
};

// ---------------------------------------------------------------------------
// Objectives.

/// Maximize σ̄_k, or minimize a functional E_f = f(σ̄_1, …, σ̄_m).
struct Objective {
  enum class Kind { maximize_eigenvalue, minimize_functional };
  Kind kind = Kind::maximize_eigenvalue;
  int k = 1;
  FunctionalSpec functional;

  static Objective eigenvalue(int k) {
    if (k < 1) throw std::invalid_argument("objective: k must be positive");
    return {Kind::maximize_eigenvalue, k, {}};
  }
  static Objective minimize(const FunctionalSpec& f) { return {Kind::minimize_functional, f.arity(), f}; }

  int arity() const { return kind == Kind::maximize_eigenvalue ? k : functional.arity(); }

  /// Reported value: σ̄_k, or E_f.
  double natural(const Spectrum& s) const {
    return kind == Kind::maximize_eigenvalue ? s.normalized[std::size_t(k)] : evaluate(functional, s);
  }
  /// Ascent value: σ̄_k, or −E_f.
  double ascent(const Spectrum& s) const { return kind == Kind::maximize_eigenvalue ? natural(s) : -natural(s); }

  /// ∂(ascent)/∂σ̄_j for j = 0..arity.
  std::vector<double> weights(const Spectrum& s) const {
    std::vector<double> w(std::size_t(arity() + 1), 0.0);
    if (kind == Kind::maximize_eigenvalue) {
      w[std::size_t(k)] = 1.0;
    } else {
      const auto g = partials(functional, s.normalized);
      for (int j = 1; j <= arity(); ++j) w[std::size_t(j)] = -g[std::size_t(j)];
    }
    return w;
  }

  std::string describe() const {
    if (kind == Kind::maximize_eigenvalue) return "maximize sigma_bar_" + std::to_string(k);
    return "minimize " + functional.name();
  }
};

struct OptimizeOptions {
  int modulation_degree = 16;
  int trace_degree = 64;  // lower bound; raised to resolve the seed
  int max_iterations = 500;
  int structured_iterations = 40;  // cap for handle seeds, whose solves are large
  double defect_tolerance = 1e-7;
  double active_tolerance = 1e-4;  // relative gap treated as a cluster by the ascent
  int restarts = 8;                // random smooth starts besides the uniform one
  double random_amplitude = 0.3;
  std::uint64_t seed = 1;
  bool structured_seeds = true;
  std::vector<double> handle_floors = {0.02, 0.05, 0.1, 0.2};  // λ / w
  double certificate_tolerance = 1e-8;
  double degeneration_ratio = 1e4;  // max β / mean β flagging concentration
};

struct IterationRecord {
  int iteration = 0;
  double value = 0.0;  // natural units
  double defect = 0.0;
  double step = 0.0;
  int cluster_size = 1;
};

struct OptimizationRun {
  DomainSpec domain;
  std::string objective;
  std::string seed_kind;
  double seed_parameter = 0.0;
  int modulation_degree = 0;
  int trace_degree = 0;
  int iterations = 0;
  std::string status;
  double value = 0.0;  // natural units at trace_degree
  double certified_value = std::numeric_limits<double>::quiet_NaN();  // at 2 · trace_degree
  double certificate_agreement = std::numeric_limits<double>::quiet_NaN();
  bool certified = false;
  double defect = 0.0;
  Spectrum spectrum;
  BoundaryWeight weight;  // degree 2 · trace_degree
  std::vector<IterationRecord> history;
  std::optional<CriticalityReport> criticality;
};

struct OptimizationResult {
  OptimizationRun best;
  std::vector<OptimizationRun> runs;
};

namespace detail {

struct Evaluation {
  bool ok = false;
  Spectrum spectrum;
  double ascent = -std::numeric_limits<double>::infinity();
};

inline Evaluation evaluate_model(const WeightModel& model, const Eigen::VectorXd& p, int n, const Objective& obj, bool traces) {
  Evaluation e;
  try {
    const BoundaryWeight w = model.weight(p, n);
    const int dim = basis_dim(n) * model.circles();
    int count = std::min(obj.arity() + 3, dim);
    SolveOptions so;
    so.keep_traces = traces;
    for (;;) {
      e.spectrum = weighted_spectrum(model.domain, w, n, count, so);
      const auto cl = clusters_of(e.spectrum.eigenvalues, 1e-3);
      bool open = false;
      for (const auto& c : cl)
        if (c.contains(obj.arity()) && c.last >= count) open = true;
      if (!open || count == dim) break;
      count = std::min(count + 4, dim);
    }
    e.ascent = obj.ascent(e.spectrum);
    e.ok = std::isfinite(e.ascent);
  } catch (const std::exception&) {
    e.ok = false;
  }
  return e;
}

struct Direction {
  Eigen::VectorXd v;
  double defect = 0.0;
  int cluster_size = 1;
  // Per active cluster: member indices, ascent weights and generators g_ab.
  struct Block {
    std::vector<int> members;
    std::vector<double> w;
    std::vector<std::vector<Eigen::VectorXd>> g;
  };
  std::vector<Block> blocks;

  /// First-order change of the ascent value along δ.
  double slope(const Eigen::VectorXd& d) const {
    double s = 0.0;
    for (const auto& b : blocks) {
      const int n = static_cast<int>(b.members.size());
      Eigen::MatrixXd G(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = b.g[std::size_t(i)][std::size_t(j)].dot(d);
      const Eigen::VectorXd mu = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G, Eigen::EigenvaluesOnly).eigenvalues();
      for (int i = 0; i < n; ++i) s += b.w[std::size_t(i)] * mu(i);
    }
    return s;
  }
};

// Generators of the active clusters in parameter coordinates, then the
// minimum-norm element of the Clarke subdifferential by Frank–Wolfe.
inline Direction ascent_direction(const WeightModel& model, const Eigen::VectorXd& p, int n, const Spectrum& s,
                                  const Objective& obj, double active_tolerance) {
  Direction dir;
  const auto wts = obj.weights(s);
  const int P = model.parameter_count();
  const double L = s.weighted_length;
  const int m = model.quadrature_nodes(2 * n);
  const int md = model.modulation_degree;

  std::vector<std::vector<double>> beta;
  for (int c = 0; c < model.circles(); ++c) beta.push_back(model.raw_samples(p, c, m));

  for (const auto& cl : clusters_of(s.eigenvalues, active_tolerance)) {
    if (cl.first > obj.arity() || cl.last <= 1) continue;
    Direction::Block b;
    bool any = false;
    for (int j = cl.first; j < cl.last; ++j) {
      b.members.push_back(j);
      const double w = j <= obj.arity() && j >= 1 ? wts[std::size_t(j)] : 0.0;
      b.w.push_back(w);
      any = any || w != 0.0;
    }
    if (!any) continue;
    const int sz = cl.size();
    dir.cluster_size = std::max(dir.cluster_size, sz);
    double sigma = 0.0;
    for (int j : b.members) sigma += s.eigenvalues[std::size_t(j)] / sz;
    b.g.assign(std::size_t(sz), std::vector<Eigen::VectorXd>(std::size_t(sz), Eigen::VectorXd::Zero(P)));
    for (int c = 0; c < model.circles(); ++c) {
      std::vector<std::vector<double>> phi;
      for (int j : b.members) phi.push_back(samples(trace_polynomial(s.traces->col(j), n, c), m));
      const double scale = sigma * model.domain.circle_scale(c) * two_pi / m;
      for (int a = 0; a < sz; ++a)
        for (int bb = a; bb < sz; ++bb) {
          std::vector<double> h(static_cast<std::size_t>(m));
          for (int j = 0; j < m; ++j)
            h[std::size_t(j)] = beta[std::size_t(c)][std::size_t(j)] *
                                ((a == bb ? 1.0 : 0.0) - L * phi[std::size_t(a)][std::size_t(j)] * phi[std::size_t(bb)][std::size_t(j)]);
          const auto F = rfft(h);
          Eigen::VectorXd& g = b.g[std::size_t(a)][std::size_t(bb)];
          if (c > 0) g(model.index(c, 0)) = scale * F[0].real();
          for (int k = 1; k <= md; ++k) {
            g(model.index(c, k)) = scale * F[std::size_t(k)].real();
            g(model.index(c, md + k)) = -scale * F[std::size_t(k)].imag();
          }
        }
    }
    for (int a = 0; a < sz; ++a)
      for (int bb = 0; bb < a; ++bb) b.g[std::size_t(a)][std::size_t(bb)] = b.g[std::size_t(bb)][std::size_t(a)];
    dir.blocks.push_back(std::move(b));
  }

  // Y_c ranges over the convex hull of {V diag(w) Vᵀ}; concave when w is
  // nonincreasing. Otherwise the current eigenbasis is used as is.
  auto combine = [&](const std::vector<Eigen::MatrixXd>& Y) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(P);
    for (std::size_t i = 0; i < dir.blocks.size(); ++i) {
      const auto& b = dir.blocks[i];
      for (std::size_t a = 0; a < b.members.size(); ++a)
        for (std::size_t c = 0; c < b.members.size(); ++c) v += Y[i](Eigen::Index(a), Eigen::Index(c)) * b.g[a][c];
    }
    return v;
  };
  std::vector<Eigen::MatrixXd> Y;
  std::vector<bool> free;
  for (const auto& b : dir.blocks) {
    const int sz = static_cast<int>(b.members.size());
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(sz, sz);
    for (int i = 0; i < sz; ++i) D(i, i) = b.w[std::size_t(i)];
    Y.push_back(D);
    free.push_back(sz > 1 && std::is_sorted(b.w.rbegin(), b.w.rend()));
  }
  Eigen::VectorXd v = combine(Y);
  if (std::any_of(free.begin(), free.end(), [](bool f) { return f; })) {
    for (int it = 0; it < 200; ++it) {
      std::vector<Eigen::MatrixXd> Z = Y;
      for (std::size_t i = 0; i < dir.blocks.size(); ++i) {
        if (!free[i]) continue;
        const auto& b = dir.blocks[i];
        const int sz = static_cast<int>(b.members.size());
        Eigen::MatrixXd S(sz, sz);
        for (int a = 0; a < sz; ++a)
          for (int c = 0; c < sz; ++c) S(a, c) = b.g[std::size_t(a)][std::size_t(c)].dot(v);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        Z[i].setZero();
        for (int a = 0; a < sz; ++a) Z[i] += b.w[std::size_t(a)] * es.eigenvectors().col(a) * es.eigenvectors().col(a).transpose();
      }
      const Eigen::VectorXd vz = combine(Z);
      const Eigen::VectorXd diff = v - vz;
      const double gap = v.dot(diff);
      if (gap <= 1e-14 * std::max(v.squaredNorm(), 1e-300)) break;
      const double gamma = std::clamp(gap / diff.squaredNorm(), 0.0, 1.0);
      for (std::size_t i = 0; i < Y.size(); ++i) Y[i] += gamma * (Z[i] - Y[i]);
      v -= gamma * diff;
    }
  }
  dir.v = v;
  dir.defect = v.norm();
  return dir;
}

inline double max_over_mean(const BoundaryWeight& w) {
  double worst = 0.0;
  for (std::size_t c = 0; c < w.size(); ++c) {
    const auto v = w.sampled(c, 4096);
    worst = std::max(worst, *std::max_element(v.begin(), v.end()) / w.components[c].a0);
  }
  return worst;
}

}  // namespace detail

/// Ascent from one seed: BFGS-scaled minimum-norm subgradient with a
/// backtracking line search. Only improving steps are accepted.
inline OptimizationRun optimize_from(const WeightModel& model, Eigen::VectorXd p, const Objective& obj, int n, int max_iterations,
                                     const OptimizeOptions& opt) {
  OptimizationRun run;
  run.domain = model.domain;
  run.objective = obj.describe();
  run.modulation_degree = model.modulation_degree;
  run.trace_degree = n;
  auto cur = detail::evaluate_model(model, p, n, obj, true);
  if (!cur.ok) throw std::domain_error("optimize: seed weight is not admissible");
  const int P = model.parameter_count();
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(P, P);
  run.status = "max-iterations";
  auto dir = detail::ascent_direction(model, p, n, cur.spectrum, obj, opt.active_tolerance);
  double step = 0.0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    run.defect = dir.defect;
    run.history.push_back({it, obj.natural(cur.spectrum), dir.defect, step, dir.cluster_size});
    if (dir.defect < opt.defect_tolerance) {
      run.status = "converged";
      break;
    }
    Eigen::VectorXd d = H * dir.v;
    double slope = dir.slope(d);
    if (!(slope > 0.0)) {
      H.setIdentity();
      d = dir.v;
      slope = dir.slope(d);
    }
    if (!(slope > 0.0)) {
      run.status = dir.cluster_size > 1 ? "critical cluster" : "no ascent direction";
      break;
    }
    // Keep trial steps inside a ball of radius 2 in parameter space.
    step = std::min(1.0, 2.0 / d.norm());
    bool moved = false;
    for (int tries = 0; tries < 30 && step * d.norm() > 1e-10; ++tries, step *= 0.5) {
      const Eigen::VectorXd q = p + step * d;
      auto trial = detail::evaluate_model(model, q, n, obj, true);
      if (trial.ok && trial.ascent >= cur.ascent + 1e-4 * step * slope) {
        auto next = detail::ascent_direction(model, q, n, trial.spectrum, obj, opt.active_tolerance);
        const Eigen::VectorXd sv = q - p, y = dir.v - next.v;  // gradient change of −ascent
        const double sy = sv.dot(y);
        if (sy > 1e-12 * sv.norm() * y.norm()) {
          const Eigen::VectorXd Hy = H * y;
          const double yHy = y.dot(Hy);
          H += ((sy + yHy) / (sy * sy)) * sv * sv.transpose() - (Hy * sv.transpose() + sv * Hy.transpose()) / sy;
        }
        p = q;
        cur = std::move(trial);
        dir = std::move(next);
        moved = true;
        break;
      }
    }
    if (!moved) {
      if (!H.isIdentity()) {
        H.setIdentity();
        continue;
      }
      run.status = dir.cluster_size > 1 ? "critical cluster" : "stalled";
      break;
    }
  }
  run.iterations = it;
  run.value = obj.natural(cur.spectrum);
  run.spectrum = cur.spectrum;
  run.weight = model.weight(p, n);
  if (obj.kind == Objective::Kind::minimize_functional && detail::max_over_mean(run.weight) > opt.degeneration_ratio)
    run.status = "degeneration toward disjoint union";

  // Certificate: the same weight resolved at twice the degree.
  const auto cert = detail::evaluate_model(model, p, 2 * n, obj, false);
  if (cert.ok) {
    run.certified_value = obj.natural(cert.spectrum);
    run.certificate_agreement = std::abs(run.certified_value - run.value) / std::abs(run.certified_value);
    run.certified = run.certificate_agreement <= opt.certificate_tolerance;
  }
  if (obj.kind == Objective::Kind::minimize_functional) {
    run.criticality = criticality_check(obj.functional, run.spectrum, flat_boundary_samples(model.domain, n, run.weight, run.spectrum));
  }
  return run;
}

namespace detail {

inline bool better(const Objective& obj, const OptimizationRun& a, const OptimizationRun& b) {
  auto key = [](const OptimizationRun& r) { return std::isfinite(r.certified_value) ? r.certified_value : r.value; };
  return obj.kind == Objective::Kind::maximize_eigenvalue ? key(a) > key(b) : key(a) < key(b);
}

}  // namespace detail

/// Multi-start driver: uniform start, `restarts` random smooth starts and,
/// for the annulus and Möbius band, the handle profile with its best floor.
inline OptimizationResult optimize(const DomainSpec& domain, const Objective& obj, const OptimizeOptions& opt = {}) {
  if (domain.kind == DomainSpec::Kind::curve) throw std::invalid_argument("optimize: flat domains only");
  OptimizationResult res;
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  auto run_seed = [&](const BoundaryWeight& seed, Eigen::VectorXd p, const std::string& kind, double param, int iterations) {
    WeightModel model{domain, seed, opt.modulation_degree};
    const int n = suggested_degree(seed, std::max(opt.trace_degree, 4 * opt.modulation_degree));
    auto run = optimize_from(model, std::move(p), obj, n, iterations, opt);
    run.seed_kind = kind;
    run.seed_parameter = param;
    res.runs.push_back(std::move(run));
  };

  const BoundaryWeight uniform = BoundaryWeight::uniform(domain.boundary_count());
  const int P = WeightModel{domain, uniform, opt.modulation_degree}.parameter_count();
  run_seed(uniform, Eigen::VectorXd::Zero(P), "uniform", 0.0, opt.max_iterations);
  for (int r = 0; r < opt.restarts; ++r) {
    WeightModel model{domain, uniform, opt.modulation_degree};
    Eigen::VectorXd p(P);
    for (int c = 0; c < model.circles(); ++c)
      for (int i = 0; i < model.block(); ++i) {
        const int idx = model.index(c, i);
        if (idx < 0) continue;
        const int k = basis_frequency(i, opt.modulation_degree);
        p(idx) = opt.random_amplitude * normal(rng) / std::max(1, k);
      }
    run_seed(uniform, p, "random", double(r), opt.max_iterations);
  }
  if (opt.structured_seeds && (domain.kind == DomainSpec::Kind::annulus || domain.kind == DomainSpec::Kind::moebius) &&
      obj.kind == Objective::Kind::maximize_eigenvalue) {
    const double w = (domain.kind == DomainSpec::Kind::annulus ? 1.0 : 2.0) * std::log(1.0 / domain.parameter);
    double best_floor = 0.0, best_value = -std::numeric_limits<double>::infinity();
    for (double f : opt.handle_floors) {
      const BoundaryWeight seed = handle_seed(domain, f * w);
      WeightModel model{domain, seed, opt.modulation_degree};
      const int n = suggested_degree(seed, std::max(opt.trace_degree, 4 * opt.modulation_degree));
      const auto e = detail::evaluate_model(model, Eigen::VectorXd::Zero(P), n, obj, false);
      if (e.ok && e.ascent > best_value) {
        best_value = e.ascent;
        best_floor = f * w;
      }
    }
    if (best_floor > 0.0)
      run_seed(handle_seed(domain, best_floor), Eigen::VectorXd::Zero(P), "handle", best_floor,
               std::min(opt.max_iterations, opt.structured_iterations));
  }
  res.best = res.runs.front();
  for (const auto& r : res.runs)
    if (detail::better(obj, r, res.best)) res.best = r;
  return res;
}

inline OptimizationResult maximize_normalized(const DomainSpec& domain, int k, const OptimizeOptions& opt = {}) {
  return optimize(domain, Objective::eigenvalue(k), opt);
}

inline OptimizationResult minimize_functional(const DomainSpec& domain, const FunctionalSpec& f, const OptimizeOptions& opt = {}) {
  return optimize(domain, Objective::minimize(f), opt);
}

struct SweepRow {
  double modulus = 0.0;
  double uniform = 0.0;  // σ̄_1 of the uniform weight
  OptimizationRun run;
  double margin = 0.0;  // certified σ̄_1 / 2π − 1
};

/// σ̄_1 maximization over a list of moduli, annulus (ρ) or Möbius band (ε).
inline std::vector<SweepRow> moduli_sweep(DomainSpec::Kind kind, const std::vector<double>& moduli, const OptimizeOptions& opt = {}) {
  std::vector<SweepRow> rows;
  for (double x : moduli) {
    const DomainSpec d = kind == DomainSpec::Kind::annulus ? DomainSpec::annulus(x) : DomainSpec::moebius(x);
    const Spectrum u = kind == DomainSpec::Kind::annulus ? flat_annulus_uniform_spectrum(x, 2) : moebius_uniform_spectrum(x, 2);
    SweepRow row{x, u.normalized[1], maximize_normalized(d, 1, opt).best, 0.0};
    const double v = std::isfinite(row.run.certified_value) ? row.run.certified_value : row.run.value;
    row.margin = v / two_pi - 1.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace steklov

#endif
