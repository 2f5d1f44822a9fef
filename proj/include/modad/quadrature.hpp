#pragma once

#include <cassert>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

namespace modad {

/// Gauss-Legendre rule on [-1,1]. A rule with n points integrates
/// polynomials of degree <= 2n-1 exactly.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

// Legendre polynomial P_n and its derivative at x.
inline std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

inline QuadratureRule make_gauss(int npts) {
  assert(npts >= 1);
  QuadratureRule rule;
  rule.nodes.resize(npts);
  rule.weights.resize(npts);
  for (int i = 0; i < npts; ++i) {
    // Newton iteration from the Chebyshev initial guess.
    double x = std::cos(M_PI * (4.0 * i + 3.0) / (4.0 * npts + 2.0));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(npts, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto [p, dp] = legendre(npts, x);
    (void)p;
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  // Enforce exact symmetry of the rule.
  for (int i = 0; i < npts / 2; ++i) {
    int j = npts - 1 - i;
    double n = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -n;
    rule.nodes[j] = n;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (npts % 2 == 1) rule.nodes[npts / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// Cached Gauss rule with `npts` points.
inline const QuadratureRule& gauss_points(int npts) {
  static std::map<int, QuadratureRule> cache;
  auto it = cache.find(npts);
  if (it == cache.end()) it = cache.emplace(npts, detail::make_gauss(npts)).first;
  return it->second;
}

/// Rule associated with polynomial degree q: q+1 points, exact to degree 2q+1.
inline const QuadratureRule& gauss_rule(int q) {
  if (q < 0) throw std::invalid_argument("gauss_rule: degree must be >= 0");
  return gauss_points(q + 1);
}

/// Nodal Lagrange basis on a set of distinct nodes in [-1,1].
class LagrangeBasis {
 public:
  explicit LagrangeBasis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    const int n = size();
    bary_.assign(n, 1.0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (k != j) bary_[j] /= (nodes_[j] - nodes_[k]);
    // Differentiation matrix D(i,j) = l_j'(x_i).
    diff_.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
      double diag = 0.0;
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        double d = bary_[j] / bary_[i] / (nodes_[i] - nodes_[j]);
        diff_[i * n + j] = d;
        diag -= d;
      }
      diff_[i * n + i] = diag;
    }
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  int degree() const { return size() - 1; }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Values of all basis functions at x.
  void eval(double x, std::vector<double>& vals) const {
    const int n = size();
    vals.assign(n, 0.0);
    int hit = node_index(x);
    if (hit >= 0) {
      vals[hit] = 1.0;
      return;
    }
    for (int j = 0; j < n; ++j) {
      double p = bary_[j];
      for (int k = 0; k < n; ++k)
        if (k != j) p *= (x - nodes_[k]);
      vals[j] = p;
    }
  }

  /// Derivatives of all basis functions at x (w.r.t. the reference coordinate).
  void eval_deriv(double x, std::vector<double>& ders) const {
    const int n = size();
    ders.assign(n, 0.0);
    int hit = node_index(x);
    if (hit >= 0) {
      for (int j = 0; j < n; ++j) ders[j] = diff_[hit * n + j];
      return;
    }
    // l_j'(x) = sum_{m != j} bary_j * prod_{k != j,m} (x - x_k)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) {
        if (m == j) continue;
        double p = bary_[j];
        for (int k = 0; k < n; ++k)
          if (k != j && k != m) p *= (x - nodes_[k]);
        s += p;
      }
      ders[j] = s;
    }
  }

  double diff_matrix(int i, int j) const { return diff_[i * size() + j]; }

 private:
  int node_index(double x) const {
    for (int j = 0; j < size(); ++j)
      if (std::abs(x - nodes_[j]) < 1e-14) return j;
    return -1;
  }

  std::vector<double> nodes_;
  std::vector<double> bary_;
  std::vector<double> diff_;
};

using BasisPtr = std::shared_ptr<const LagrangeBasis>;

/// Cached Lagrange basis at the n Gauss points.
inline BasisPtr gauss_basis(int npts) {
  static std::map<int, BasisPtr> cache;
  auto it = cache.find(npts);
  if (it == cache.end()) {
    it = cache.emplace(npts, std::make_shared<LagrangeBasis>(gauss_points(npts).nodes)).first;
  }
  return it->second;
}

/// Cached basis at {-1, gauss points of npts-2, +1}; used by the 2D solution
/// reconstruction whose interpolation points include cell boundaries.
inline BasisPtr gauss_lobatto_like_basis(int npts) {
  static std::map<int, BasisPtr> cache;
  auto it = cache.find(npts);
  if (it == cache.end()) {
    std::vector<double> nodes;
    nodes.push_back(-1.0);
    for (double x : gauss_points(npts - 2).nodes) nodes.push_back(x);
    nodes.push_back(1.0);
    it = cache.emplace(npts, std::make_shared<LagrangeBasis>(std::move(nodes))).first;
  }
  return it->second;
}

/// Basis at npts equispaced nodes including the endpoints; used for the
/// conforming space of the dual-norm solve.
inline BasisPtr equispaced_basis(int npts) {
  static std::map<int, BasisPtr> cache;
  auto it = cache.find(npts);
  if (it == cache.end()) {
    std::vector<double> nodes(npts);
    for (int i = 0; i < npts; ++i) nodes[i] = -1.0 + 2.0 * i / (npts - 1.0);
    it = cache.emplace(npts, std::make_shared<LagrangeBasis>(std::move(nodes))).first;
  }
  return it->second;
}

}  // namespace modad
