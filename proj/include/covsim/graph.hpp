#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "covsim/geometry.hpp"

namespace covsim {

/// Thrown when a scenario violates a start-up assumption (e.g. disconnected graph).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GraphPolicy {
  enum class Kind { Complete, Disk };
  Kind kind = Kind::Complete;
  double radius = 0.0;              // disk only
  bool recompute_each_step = false; // default: frozen at initial positions
};

/// Undirected communication graph over robot ids, symmetric and irreflexive.
class CommGraph {
 public:
  CommGraph() = default;
  explicit CommGraph(int n) : n_(n), adj_(static_cast<std::size_t>(n) * n, 0) {}

  int size() const { return n_; }

  void add_edge(int i, int j) {
    if (i == j) return;
    adj_[idx(i, j)] = 1;
    adj_[idx(j, i)] = 1;
  }

  bool has_edge(int i, int j) const { return i != j && adj_[idx(i, j)] != 0; }

  int degree(int i) const {
    int d = 0;
    for (int j = 0; j < n_; ++j) d += has_edge(i, j) ? 1 : 0;
    return d;
  }

  std::vector<int> neighbors(int i) const {
    std::vector<int> out;
    for (int j = 0; j < n_; ++j) {
      if (has_edge(i, j)) out.push_back(j);
    }
    return out;
  }

  bool connected() const {
    if (n_ <= 1) return true;
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n_; ++v) {
        if (!seen[v] && has_edge(u, v)) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n_;
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  int n_ = 0;
  std::vector<std::uint8_t> adj_;
};

inline CommGraph complete_graph(int n) {
  CommGraph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  }
  return g;
}

inline CommGraph disk_graph(std::span<const Point2> positions, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk radius must be > 0");
  const int n = static_cast<int>(positions.size());
  CommGraph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (distance(positions[i], positions[j]) <= radius) g.add_edge(i, j);
    }
  }
  return g;
}

/// Builds the graph for a scenario and enforces the connected-network assumption.
inline CommGraph build_graph(std::span<const Point2> positions, const GraphPolicy& policy) {
  if (positions.empty()) throw std::invalid_argument("build_graph: no robots");
  CommGraph g = policy.kind == GraphPolicy::Kind::Complete
                    ? complete_graph(static_cast<int>(positions.size()))
                    : disk_graph(positions, policy.radius);
  if (!g.connected()) {
    throw ScenarioError("communication graph is disconnected; robots must form a connected network");
  }
  return g;
}

/// L = D - A, row-major, row sums exactly zero.
inline std::vector<double> laplacian(const CommGraph& g) {
  const int n = g.size();
  std::vector<double> lap(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double deg = 0.0;
    for (int j = 0; j < n; ++j) {
      if (g.has_edge(i, j)) {
        lap[static_cast<std::size_t>(i) * n + j] = -1.0;
        deg += 1.0;
      }
    }
    lap[static_cast<std::size_t>(i) * n + i] = deg;
  }
  return lap;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
/// Dense O(n^3) is ample at n <= 100 and keeps the library dependency-free.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n) {
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    }
    if (std::sqrt(2.0 * off) < 1e-10) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

/// Second-smallest Laplacian eigenvalue (Fiedler value); 0 iff disconnected.
inline double algebraic_connectivity(const CommGraph& g) {
  const int n = g.size();
  if (n <= 1) return std::numeric_limits<double>::infinity();
  const std::vector<double> eig = jacobi_eigenvalues(laplacian(g), n);
  return eig[1];
}

}  // namespace covsim
