#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stmod/modulus.hpp"
#include "stmod/multigraph.hpp"
#include "stmod/types.hpp"

namespace stmod {

/// Assignment of every vertex to a block 0..k-1. Block ids are
/// renumbered in order of first appearance so equal partitions compare
/// equal.
class VertexPartition {
 public:
  VertexPartition() = default;
  explicit VertexPartition(std::vector<std::size_t> block_of) : block_of_(std::move(block_of)) {
    if (block_of_.empty()) throw InputError("vertex partition: no vertices");
    std::vector<std::size_t> rename;
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    for (auto& b : block_of_) {
      if (b >= rename.size()) rename.resize(b + 1, unset);
      if (rename[b] == unset) rename[b] = blocks_++;
      b = rename[b];
    }
  }

  std::size_t block_count() const noexcept { return blocks_; }
  std::size_t vertex_count() const noexcept { return block_of_.size(); }
  std::size_t block_of(VertexId v) const { return block_of_.at(v); }
  std::span<const std::size_t> assignment() const noexcept { return block_of_; }

  std::vector<std::vector<VertexId>> blocks() const {
    std::vector<std::vector<VertexId>> out(blocks_);
    for (VertexId v = 0; v < block_of_.size(); ++v) out[block_of_[v]].push_back(v);
    return out;
  }

  friend bool operator==(const VertexPartition&, const VertexPartition&) = default;

 private:
  std::vector<std::size_t> block_of_;
  std::size_t blocks_ = 0;
};

/// A partition into k ≥ 2 blocks that each induce a connected subgraph.
/// Weight w(P) = |E_P| / (k - 1), with E_P the edges crossing blocks.
struct FeasiblePartition {
  VertexPartition partition;
  std::vector<EdgeId> cut_edges;
  Ratio weight;

  std::size_t block_count() const { return partition.block_count(); }
};

namespace detail {

inline std::vector<EdgeId> crossing_edges(const Multigraph& g, const VertexPartition& p) {
  std::vector<EdgeId> cut;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (p.block_of(g.edge(e).u) != p.block_of(g.edge(e).v)) cut.push_back(e);
  }
  return cut;
}

// Index of the first block that does not induce a connected subgraph, or
// block_count() when all blocks are connected.
inline std::size_t first_disconnected_block(const Multigraph& g, const VertexPartition& p) {
  std::size_t comps = 0;
  auto comp = component_labels(
      g, [&](EdgeId e) { return p.block_of(g.edge(e).u) == p.block_of(g.edge(e).v); }, &comps);
  if (comps == p.block_count()) return p.block_count();
  std::vector<std::size_t> comp_of_block(p.block_count(), static_cast<std::size_t>(-1));
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    auto& c = comp_of_block[p.block_of(v)];
    if (c == static_cast<std::size_t>(-1)) {
      c = comp[v];
    } else if (c != comp[v]) {
      return p.block_of(v);
    }
  }
  return p.block_count();
}

}  // namespace detail

inline FeasiblePartition validate_feasible(const Multigraph& g, const VertexPartition& p) {
  if (p.vertex_count() != g.vertex_count()) throw InputError("validate_feasible: partition does not cover the graph");
  if (p.block_count() < 2) throw InputError("validate_feasible: a feasible partition needs at least two blocks");
  const std::size_t bad = detail::first_disconnected_block(g, p);
  if (bad != p.block_count()) {
    std::string members;
    const auto blocks = p.blocks();
    for (VertexId v : blocks[bad]) members += (members.empty() ? "" : ",") + g.label(v);
    throw InputError("validate_feasible: block " + std::to_string(bad) + " {" + members + "} is not connected");
  }
  FeasiblePartition out{p, detail::crossing_edges(g, p), {}};
  out.weight = Ratio{out.cut_edges.size(), p.block_count() - 1};
  return out;
}

/// |γ ∩ E_P|; at least k_P - 1 for every spanning tree.
inline std::size_t tree_crossings(const Multigraph& g, const VertexPartition& p, const SpanningTree& tree) {
  std::size_t count = 0;
  for (EdgeId e : tree) {
    if (p.block_of(g.edge(e).u) != p.block_of(g.edge(e).v)) ++count;
  }
  return count;
}

/// Grouping tolerance for η levels: 10·ε_tol·max η*, floored at 1e-10.
inline double level_tolerance(const ModulusResult& result) {
  return std::max(10.0 * result.config.tolerance * result.eta_star.max(), 1e-10);
}

/// The minimum feasible partition read off η*: E* holds the edges where η*
/// is maximal and the blocks are the components of G - E*. Checks that the
/// crossing edges are exactly E* and that η* ≡ 1/w(P*) on them.
inline FeasiblePartition min_feasible_partition(const Multigraph& g, const ModulusResult& result,
                                                std::optional<double> tolerance = std::nullopt) {
  if (g.edge_count() == 0) throw InputError("min_feasible_partition: graph has no edges");
  const double tol = tolerance.value_or(level_tolerance(result));
  const double top = result.eta_star.max();
  std::vector<bool> in_star(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) in_star[e] = result.eta_star[e] >= top - tol;
  auto comp = component_labels(g, [&](EdgeId e) { return !in_star[e]; });
  FeasiblePartition p = validate_feasible(g, VertexPartition(std::move(comp)));
  for (EdgeId e : p.cut_edges) {
    if (!in_star[e]) throw NumericalError("min_feasible_partition: crossing edge below the top eta level");
  }
  if (p.cut_edges.size() != static_cast<std::size_t>(std::count(in_star.begin(), in_star.end(), true))) {
    throw NumericalError("min_feasible_partition: a top-level edge lies inside a block");
  }
  if (std::abs(top * p.weight.value() - 1.0) > 1e-6) {
    throw NumericalError("min_feasible_partition: max eta* is not 1/w(P*)");
  }
  return p;
}

/// Calls `visit` for every feasible partition of g (restricted-growth
/// enumeration of all set partitions, filtered for connected blocks).
inline void for_each_feasible_partition(const Multigraph& g, std::size_t vertex_cap,
                                        const std::function<void(const VertexPartition&)>& visit) {
  const std::size_t n = g.vertex_count();
  if (n > vertex_cap) throw CapExceeded("partition enumeration: too many vertices", n, vertex_cap);
  if (n < 2) return;
  std::vector<std::size_t> rgs(n, 0);
  std::function<void(std::size_t, std::size_t)> recurse = [&](std::size_t i, std::size_t used) {
    if (i == n) {
      if (used < 2) return;
      VertexPartition p(rgs);
      if (detail::first_disconnected_block(g, p) == p.block_count()) visit(p);
      return;
    }
    for (std::size_t b = 0; b <= used; ++b) {
      rgs[i] = b;
      recurse(i + 1, std::max(used, b + 1));
    }
  };
  rgs[0] = 0;
  recurse(1, 1);
}

inline constexpr std::size_t kPartitionVertexCap = 12;

struct PartitionHomogeneity {
  bool homogeneous = true;
  std::optional<FeasiblePartition> witness;  // a partition with w(P) < θ(G)
  std::size_t partitions_checked = 0;
};

/// Homogeneity via partitions: G is homogeneous iff every feasible
/// partition has w(P) ≥ |E|/(|V|-1). Exact rational comparisons.
inline PartitionHomogeneity homogeneity_by_partitions(const Multigraph& g, std::size_t vertex_cap = kPartitionVertexCap) {
  if (g.vertex_count() < 2) throw InputError("homogeneity_by_partitions: need at least two vertices");
  const Ratio theta{g.edge_count(), g.vertex_count() - 1};
  PartitionHomogeneity out;
  for_each_feasible_partition(g, vertex_cap, [&](const VertexPartition& p) {
    ++out.partitions_checked;
    const Ratio w{detail::crossing_edges(g, p).size(), p.block_count() - 1};
    if (w < theta && (!out.witness || w < out.witness->weight)) {
      out.homogeneous = false;
      out.witness = validate_feasible(g, p);
    }
  });
  return out;
}

}  // namespace stmod
