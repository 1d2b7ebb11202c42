#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <boost/multiprecision/cpp_int.hpp>

#include "stmod/multigraph.hpp"
#include "stmod/types.hpp"

namespace stmod {

using BigInt = boost::multiprecision::cpp_int;

/// Union-find with union by size and an undo log (no path compression, so
/// that unions can be rolled back in LIFO order).
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    ++merges_;
    return true;
  }

  void rollback() {
    std::size_t b = history_.back();
    history_.pop_back();
    std::size_t a = parent_[b];
    size_[a] -= size_[b];
    parent_[b] = b;
    --merges_;
  }

  std::size_t merges() const noexcept { return merges_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> history_;
  std::size_t merges_ = 0;
};

inline bool is_spanning_tree(const Multigraph& g, std::span<const EdgeId> edge_ids) {
  if (g.vertex_count() == 0 || edge_ids.size() != g.vertex_count() - 1) return false;
  UnionFind uf(g.vertex_count());
  for (EdgeId e : edge_ids) {
    if (e >= g.edge_count()) return false;
    if (!uf.unite(g.edge(e).u, g.edge(e).v)) return false;
  }
  return true;
}

inline bool is_spanning_tree(const Multigraph& g, const SpanningTree& tree) {
  return is_spanning_tree(g, tree.edges());
}

inline double tree_cost(const EdgeVector& rho, const SpanningTree& tree) {
  double total = 0.0;
  for (EdgeId e : tree) total += rho[e];
  return total;
}

/// Minimum spanning tree under `rho` (Kruskal). Ties are broken by
/// ascending edge id, so the result is reproducible.
inline SpanningTree min_tree(const Multigraph& g, std::span<const double> rho) {
  if (rho.size() != g.edge_count()) throw InputError("min_tree: density length does not match edge count");
  std::vector<EdgeId> order(g.edge_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    return rho[a] < rho[b] || (rho[a] == rho[b] && a < b);
  });
  UnionFind uf(g.vertex_count());
  std::vector<EdgeId> chosen;
  chosen.reserve(g.vertex_count());
  for (EdgeId e : order) {
    if (uf.unite(g.edge(e).u, g.edge(e).v)) {
      chosen.push_back(e);
      if (chosen.size() + 1 == g.vertex_count()) break;
    }
  }
  if (chosen.size() + 1 != g.vertex_count()) throw InputError("min_tree: graph is not connected");
  return SpanningTree(std::move(chosen));
}

inline SpanningTree min_tree(const Multigraph& g, const EdgeVector& rho) { return min_tree(g, rho.values()); }

/// Exact spanning-tree count: fraction-free (Bareiss) determinant of the
/// Laplacian with its last row and column removed.
inline BigInt count_trees(const Multigraph& g) {
  require_connected(g, "count_trees");
  const std::size_t n = g.vertex_count();
  if (n <= 1) return 1;
  const std::size_t k = n - 1;
  std::vector<std::vector<BigInt>> a(k, std::vector<BigInt>(k, 0));
  for (const auto& [u, v] : g.edges()) {
    if (u < k) a[u][u] += 1;
    if (v < k) a[v][v] += 1;
    if (u < k && v < k) {
      a[u][v] -= 1;
      a[v][u] -= 1;
    }
  }
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t p = 0; p < k; ++p) {
    if (a[p][p] == 0) {
      std::size_t swap_row = p + 1;
      while (swap_row < k && a[swap_row][p] == 0) ++swap_row;
      if (swap_row == k) return 0;
      std::swap(a[p], a[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = p + 1; i < k; ++i) {
      for (std::size_t j = p + 1; j < k; ++j) {
        a[i][j] = (a[i][j] * a[p][p] - a[i][p] * a[p][j]) / prev;
      }
    }
    prev = a[p][p];
  }
  BigInt det = a[k - 1][k - 1];
  return sign > 0 ? det : BigInt(-det);
}

/// Visits every spanning tree exactly once, in lexicographic order of the
/// sorted edge-id lists. Include/exclude branching over edges in id order;
/// an edge is only excluded while the remaining edges can still span.
inline void for_each_spanning_tree(const Multigraph& g, const std::function<void(const SpanningTree&)>& visit) {
  const std::size_t n = g.vertex_count();
  const std::size_t m = g.edge_count();
  if (n == 0) return;
  if (n == 1) {
    visit(SpanningTree{});
    return;
  }
  UnionFind uf(n);
  std::vector<EdgeId> chosen;

  auto can_still_span = [&](std::size_t from) {
    UnionFind probe(n);
    std::size_t merged = 0;
    for (EdgeId e : chosen) merged += probe.unite(g.edge(e).u, g.edge(e).v);
    for (EdgeId e = from; e < m && merged + 1 < n; ++e) merged += probe.unite(g.edge(e).u, g.edge(e).v);
    return merged + 1 == n;
  };

  std::function<void(EdgeId)> recurse = [&](EdgeId next) {
    if (chosen.size() + 1 == n) {
      visit(SpanningTree(chosen));
      return;
    }
    if (next == m) return;
    const auto [u, v] = g.edge(next);
    if (uf.unite(u, v)) {
      chosen.push_back(next);
      recurse(next + 1);
      chosen.pop_back();
      uf.rollback();
    }
    if (can_still_span(next + 1)) recurse(next + 1);
  };
  if (can_still_span(0)) recurse(0);
}

/// All spanning trees; throws CapExceeded (with the exact count) when the
/// graph has more than `cap` trees.
inline std::vector<SpanningTree> enumerate_trees(const Multigraph& g, std::size_t cap) {
  const BigInt total = count_trees(g);
  if (total > cap) {
    const std::size_t reported =
        total > BigInt(std::numeric_limits<std::size_t>::max()) ? std::numeric_limits<std::size_t>::max()
                                                                 : total.convert_to<std::size_t>();
    throw CapExceeded("enumerate_trees: graph has " + total.str() + " spanning trees", reported, cap);
  }
  std::vector<SpanningTree> trees;
  trees.reserve(total.convert_to<std::size_t>());
  for_each_spanning_tree(g, [&](const SpanningTree& t) { trees.push_back(t); });
  return trees;
}

/// Above this vertex count effective resistances use conjugate gradients
/// on the sparse grounded Laplacian instead of a dense inverse.
inline constexpr std::size_t kDenseResistanceLimit = 2000;

/// Effective resistance across every edge of the unit-conductance network.
inline EdgeVector effective_resistance(const Multigraph& g, std::size_t dense_limit = kDenseResistanceLimit) {
  require_connected(g, "effective_resistance");
  const std::size_t n = g.vertex_count();
  EdgeVector out(g.edge_count(), EdgeRole::Resistance);
  if (g.edge_count() == 0) return out;
  const std::size_t k = n - 1;  // vertex n-1 is grounded
  const auto grounded = static_cast<Eigen::Index>(k);

  if (n <= dense_limit) {
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(grounded, grounded);
    for (const auto& [u, v] : g.edges()) {
      if (u < k) lap(u, u) += 1.0;
      if (v < k) lap(v, v) += 1.0;
      if (u < k && v < k) {
        lap(u, v) -= 1.0;
        lap(v, u) -= 1.0;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(lap);
    if (llt.info() != Eigen::Success) throw NumericalError("effective_resistance: singular grounded Laplacian");
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(grounded, grounded));
    auto entry = [&](VertexId a, VertexId b) { return (a < k && b < k) ? inv(a, b) : 0.0; };
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      const auto [u, v] = g.edge(e);
      out[e] = entry(u, u) + entry(v, v) - 2.0 * entry(u, v);
    }
    return out;
  }

  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& [u, v] : g.edges()) {
    if (u < k) triplets.emplace_back(u, u, 1.0);
    if (v < k) triplets.emplace_back(v, v, 1.0);
    if (u < k && v < k) {
      triplets.emplace_back(u, v, -1.0);
      triplets.emplace_back(v, u, -1.0);
    }
  }
  Eigen::SparseMatrix<double> lap(grounded, grounded);
  lap.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-10);
  cg.setMaxIterations(static_cast<Eigen::Index>(10 * n));
  cg.compute(lap);
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (const auto& [u, v] : g.edges()) pairs.emplace_back(std::min(u, v), std::max(u, v));
  std::vector<std::pair<VertexId, VertexId>> distinct = pairs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> value(distinct.size());
  Eigen::VectorXd rhs(grounded);
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    const auto [a, b] = distinct[i];
    rhs.setZero();
    if (a < k) rhs(a) += 1.0;
    if (b < k) rhs(b) -= 1.0;
    Eigen::VectorXd x = cg.solve(rhs);
    if (cg.info() != Eigen::Success) throw NumericalError("effective_resistance: CG did not converge");
    value[i] = (a < k ? x(a) : 0.0) - (b < k ? x(b) : 0.0);
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    auto it = std::lower_bound(distinct.begin(), distinct.end(), pairs[e]);
    out[e] = value[static_cast<std::size_t>(it - distinct.begin())];
  }
  return out;
}

}  // namespace stmod
