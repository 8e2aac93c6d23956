#ifndef STEKLOV_FUNCTIONALS_HPP
#define STEKLOV_FUNCTIONALS_HPP

// Spectral functionals f(σ̄_1, …, σ̄_m), their partials, and the boundary-mass
// condition satisfied by critical weights.

#include "steklov/spectrum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace steklov {

struct FunctionalSpec {
  enum class Kind { ht_plus, ht_minus, hst, fmn, single_neg };

  Kind kind = Kind::ht_plus;
  double t = 1.0;
  double s = 1.0;
  int m = 1;  // Fmn first index, or k for SingleEigenvalueNeg
  int n = 2;  // Fmn second index

  static FunctionalSpec ht_plus(double t) { return check({Kind::ht_plus, t, 1.0, 1, 2}); }
  static FunctionalSpec ht_minus(double t) { return check({Kind::ht_minus, t, 1.0, 1, 2}); }
  static FunctionalSpec hst(double s, double t) {
    if (s == 0.0) throw std::invalid_argument("hst: s must be nonzero");
    return check({Kind::hst, t, s, 1, 2});
  }
  static FunctionalSpec fmn(int m, int n) {
    if (m < 1 || n < 1) throw std::invalid_argument("fmn: indices must be positive");
    return {Kind::fmn, 0.0, 1.0, m, n};
  }
  static FunctionalSpec single_neg(int k) {
    if (k < 1) throw std::invalid_argument("single_neg: k must be positive");
    return {Kind::single_neg, 0.0, 1.0, k, k};
  }

  /// Number of normalized eigenvalues consumed.
  int arity() const {
    switch (kind) {
      case Kind::fmn: return std::max(m, n);
      case Kind::single_neg: return m;
      default: return 2;
    }
  }

  std::string name() const {
    switch (kind) {
      case Kind::ht_plus: return "HtPlus";
      case Kind::ht_minus: return "HtMinus";
      case Kind::hst: return "Hst";
      case Kind::fmn: return "Fmn";
      case Kind::single_neg: return "SingleEigenvalueNeg";
    }
    return "?";
  }

 private:
  static FunctionalSpec check(FunctionalSpec f) {
    if (!(f.t >= 0.0)) throw std::invalid_argument("functional: t must be >= 0");
    return f;
  }
};

/// f(x_1, …, x_m) with x indexed from 1 (x[0] is ignored). +∞ where a
/// negative power meets a zero argument.
inline double evaluate(const FunctionalSpec& f, const std::vector<double>& x) {
  if (int(x.size()) <= f.arity()) throw std::invalid_argument("evaluate: not enough eigenvalues");
  const double inf = std::numeric_limits<double>::infinity();
  auto inv = [inf](double v) { return v > 0.0 ? 1.0 / v : inf; };
  switch (f.kind) {
    case FunctionalSpec::Kind::ht_plus: return inv(x[1]) + (f.t == 0.0 ? 0.0 : f.t * inv(x[2]));
    case FunctionalSpec::Kind::ht_minus: return inv(x[1] + f.t * x[2]);
    case FunctionalSpec::Kind::hst: {
      auto pw = [&](double v) { return v > 0.0 ? std::pow(v, -f.s) : (f.s > 0.0 ? inf : 0.0); };
      const double u = pw(x[1]) + (f.t == 0.0 ? 0.0 : f.t * pw(x[2]));
      if (std::isinf(u)) return inf;
      if (u == 0.0) return f.s > 0.0 ? 0.0 : inf;
      return std::pow(u, 1.0 / f.s);
    }
    case FunctionalSpec::Kind::fmn: return inv(x[std::size_t(f.m)]) * inv(x[std::size_t(f.n)]);
    case FunctionalSpec::Kind::single_neg: return -x[std::size_t(f.m)];
  }
  return inf;
}

/// Gradient (∂_1 f, …, ∂_m f) at a point with finite value; index 0 unused.
inline std::vector<double> partials(const FunctionalSpec& f, const std::vector<double>& x) {
  const int m = f.arity();
  if (int(x.size()) <= m) throw std::invalid_argument("partials: not enough eigenvalues");
  std::vector<double> g(std::size_t(m + 1), 0.0);
  switch (f.kind) {
    case FunctionalSpec::Kind::ht_plus:
      g[1] = -1.0 / (x[1] * x[1]);
      g[2] = -f.t / (x[2] * x[2]);
      break;
    case FunctionalSpec::Kind::ht_minus: {
      const double d = x[1] + f.t * x[2];
      g[1] = -1.0 / (d * d);
      g[2] = -f.t / (d * d);
      break;
    }
    case FunctionalSpec::Kind::hst: {
      const double u = std::pow(x[1], -f.s) + f.t * std::pow(x[2], -f.s);
      const double c = std::pow(u, 1.0 / f.s - 1.0);
      g[1] = -c * std::pow(x[1], -f.s - 1.0);
      g[2] = -f.t * c * std::pow(x[2], -f.s - 1.0);
      break;
    }
    case FunctionalSpec::Kind::fmn:
      if (f.m == f.n) {
        g[std::size_t(f.m)] = -2.0 / std::pow(x[std::size_t(f.m)], 3);
      } else {
        const double a = x[std::size_t(f.m)], b = x[std::size_t(f.n)];
        g[std::size_t(f.m)] = -1.0 / (a * a * b);
        g[std::size_t(f.n)] = -1.0 / (a * b * b);
      }
      break;
    case FunctionalSpec::Kind::single_neg: g[std::size_t(f.m)] = -1.0; break;
  }
  return g;
}

inline double evaluate(const FunctionalSpec& f, const Spectrum& s) { return evaluate(f, s.normalized); }

struct PartialsResult {
  std::vector<double> gradient;  // index 0 unused
  bool at_cluster = false;       // some consumed σ̄_k shares a cluster with another index
  std::vector<Cluster> clusters;  // clusters meeting {1, …, m}
};

inline PartialsResult partials(const FunctionalSpec& f, const Spectrum& s) {
  PartialsResult r{partials(f, s.normalized), false, {}};
  const int m = f.arity();
  for (const auto& c : s.clusters()) {
    if (c.first > m || c.last <= 1) continue;
    r.clusters.push_back(c);
    if (c.size() > 1) r.at_cluster = true;
  }
  return r;
}

/// Boundary quadrature: measure_j ≈ β dL at sample j, values(j, k) = φ_k at sample j.
struct BoundarySamples {
  Eigen::VectorXd measure;
  Eigen::MatrixXd values;
};

struct ClusterDefect {
  Cluster cluster;
  double lhs = 0.0;     // Σ_{j∈I_i} ∫ φ_j² β dL for the fitted eigenmap
  double rhs = 0.0;     // Σ_{k∈I_i, k≤m} ∂_k f / Σ_k σ_k ∂_k f · ∫ β dL
  double defect = 0.0;  // |lhs − rhs| / ∫ β dL
};

struct CriticalityReport {
  std::vector<ClusterDefect> clusters;
  double max_defect = 0.0;
  double fit_residual = 0.0;         // max_j |Σ σ_c φᵀ G_c φ − 1|
  double min_gram_eigenvalue = 0.0;  // negative values mean no admissible eigenmap
  bool cluster_extends_past_m = false;
};

/// Critical-point test: finds Gram matrices
/// G_c ⪰ 0 (one per cluster up to σ_m's) with Σ_c σ_c φ_cᵀ G_c φ_c ≡ 1 on the
/// boundary and compares tr G_c with the ratio of partials. Among exact fits
/// the one closest to the target traces is chosen.
inline CriticalityReport criticality_check(const FunctionalSpec& f, const Spectrum& s, const BoundarySamples& b) {
  const int m = f.arity();
  if (s.size() <= m) throw std::invalid_argument("criticality_check: not enough eigenvalues");
  const double length = b.measure.sum();

  std::vector<Cluster> used;
  CriticalityReport rep;
  for (const auto& c : s.clusters()) {
    if (c.last <= 1) continue;
    if (c.first > m) break;
    if (c.last - 1 > m) rep.cluster_extends_past_m = true;
    if (c.last > s.size() || c.last > b.values.cols()) throw std::invalid_argument("criticality_check: cluster beyond stored traces");
    used.push_back(c);
  }

  // Measure-orthonormal basis of each cluster's trace space.
  std::vector<Eigen::MatrixXd> phi;
  const Eigen::VectorXd sw = b.measure.cwiseSqrt();
  for (const auto& c : used) {
    Eigen::MatrixXd X = sw.asDiagonal() * b.values.middleCols(c.first, c.size());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(X.rows(), c.size());
    phi.push_back(sw.cwiseInverse().asDiagonal() * Q);
  }

  // Unknowns: upper triangles of the G_c.
  std::vector<int> offset{0};
  for (const auto& c : used) offset.push_back(offset.back() + c.size() * (c.size() + 1) / 2);
  const int nu = offset.back(), ns = static_cast<int>(b.measure.size());
  Eigen::MatrixXd A(ns, nu), T = Eigen::MatrixXd::Zero(Eigen::Index(used.size()), nu);
  for (std::size_t ci = 0; ci < used.size(); ++ci) {
    const double sig = s.eigenvalues[std::size_t(used[ci].first)];
    const int d = used[ci].size();
    int col = offset[ci];
    for (int a = 0; a < d; ++a)
      for (int c2 = a; c2 < d; ++c2, ++col) {
        const double mult = (a == c2) ? 1.0 : 2.0;
        A.col(col) = sig * mult * phi[ci].col(a).cwiseProduct(phi[ci].col(c2));
        if (a == c2) T(Eigen::Index(ci), col) = 1.0;
      }
  }

  const auto g = partials(f, s.normalized);
  double denom = 0.0;
  for (int k = 1; k <= m; ++k) denom += s.eigenvalues[std::size_t(k)] * g[std::size_t(k)];
  Eigen::VectorXd rhs(Eigen::Index(used.size()));
  for (std::size_t ci = 0; ci < used.size(); ++ci) {
    double num = 0.0;
    for (int k = used[ci].first; k < used[ci].last && k <= m; ++k) num += g[std::size_t(k)];
    rhs(Eigen::Index(ci)) = num / denom * length;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV | Eigen::ComputeThinU);
  svd.setThreshold(1e-10);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ns);
  Eigen::VectorXd x = svd.solve(ones);
  const int rank = static_cast<int>(svd.rank());
  if (rank < nu) {
    const Eigen::MatrixXd N = svd.matrixV().rightCols(nu - rank);
    const Eigen::VectorXd z = (T * N).jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs - T * x);
    x += N * z;
  }
  rep.fit_residual = (A * x - ones).cwiseAbs().maxCoeff();
  rep.min_gram_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t ci = 0; ci < used.size(); ++ci) {
    const int d = used[ci].size();
    Eigen::MatrixXd G(d, d);
    int col = offset[ci];
    for (int a = 0; a < d; ++a)
      for (int c2 = a; c2 < d; ++c2, ++col) G(a, c2) = G(c2, a) = x(col);
    rep.min_gram_eigenvalue = std::min(rep.min_gram_eigenvalue, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff());
    ClusterDefect cd{used[ci], G.trace(), rhs(Eigen::Index(ci)), 0.0};
    cd.defect = std::abs(cd.lhs - cd.rhs) / length;
    rep.max_defect = std::max(rep.max_defect, cd.defect);
    rep.clusters.push_back(cd);
  }
  return rep;
}

}  // namespace steklov

#endif
