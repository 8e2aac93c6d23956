#ifndef STEKLOV_SPECTRUM_HPP
#define STEKLOV_SPECTRUM_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace steklov {

inline constexpr double default_cluster_tolerance = 1e-8;

/// Half-open index range [first, last) of eigenvalues forming a cluster.
struct Cluster {
  int first = 0;
  int last = 0;
  int size() const { return last - first; }
  bool contains(int k) const { return k >= first && k < last; }
};

inline bool same_cluster(double a, double b, double tol) {
  return a == b || std::abs(b - a) <= tol * std::max(std::abs(a), std::abs(b));
}

/// Groups a sorted list by relative gap.
inline std::vector<Cluster> clusters_of(const std::vector<double>& values, double tol) {
  std::vector<Cluster> out;
  const int n = static_cast<int>(values.size());
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || !same_cluster(values[i - 1], values[i], tol)) {
      out.push_back({start, i});
      start = i;
    }
  }
  return out;
}

/// Sorted Steklov eigenvalues σ_0 ≤ σ_1 ≤ … with their normalized values
/// σ̄_k = σ_k ∫β dL and cluster multiplicities.
struct Spectrum {
  std::vector<double> eigenvalues;
  std::vector<int> multiplicities;  // size of the cluster containing each σ_k
  std::vector<double> normalized;
  double weighted_length = 0.0;
  double multiplicity_tolerance = default_cluster_tolerance;
  // Column k holds the trace coefficients of the k-th eigenvector, when kept.
  std::optional<Eigen::MatrixXd> traces;

  int size() const { return static_cast<int>(eigenvalues.size()); }

  std::vector<Cluster> clusters() const { return clusters_of(eigenvalues, multiplicity_tolerance); }

  Cluster cluster_of(int k) const {
    for (const auto& c : clusters())
      if (c.contains(k)) return c;
    throw std::out_of_range("cluster_of: index outside spectrum");
  }

  /// Fills multiplicities and normalized values from eigenvalues and length.
  void finalize() {
    normalized.resize(eigenvalues.size());
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) normalized[k] = eigenvalues[k] * weighted_length;
    multiplicities.assign(eigenvalues.size(), 1);
    for (const auto& c : clusters())
      for (int k = c.first; k < c.last; ++k) multiplicities[std::size_t(k)] = c.size();
  }

  static Spectrum from_values(std::vector<double> values, double length, double tol = default_cluster_tolerance) {
    std::sort(values.begin(), values.end());
    Spectrum s;
    s.eigenvalues = std::move(values);
    s.weighted_length = length;
    s.multiplicity_tolerance = tol;
    s.finalize();
    return s;
  }
};

}  // namespace steklov

#endif
