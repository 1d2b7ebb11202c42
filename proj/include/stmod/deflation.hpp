#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "stmod/meo_analysis.hpp"
#include "stmod/modulus.hpp"
#include "stmod/multigraph.hpp"
#include "stmod/partitions.hpp"
#include "stmod/tree_oracle.hpp"
#include "stmod/types.hpp"

namespace stmod {

/// θ(G) = |E| / (|V| - 1).
inline Ratio denseness_ratio(const Multigraph& g) {
  if (g.vertex_count() < 2) throw InputError("denseness: graph has a single vertex");
  return Ratio{g.edge_count(), g.vertex_count() - 1};
}

inline double denseness(const Multigraph& g) { return denseness_ratio(g).value(); }

/// A homogeneous core: a connected vertex-induced subgraph on which η*
/// attains its minimum κ.
struct Core {
  std::vector<VertexId> vertices;  // in the graph the core was taken from
  Subgraph subgraph;
  double kappa = 0.0;

  Ratio theta() const { return denseness_ratio(subgraph.graph); }
};

/// Every connected component of the subgraph formed by the edges with
/// η* within `tol` of its minimum, each closed to a vertex-induced
/// subgraph. Ordered by least vertex. Throws NumericalError if a closure
/// picks up an edge that is not at the minimum level.
inline std::vector<Core> homogeneous_cores(const Multigraph& g, const ModulusResult& result,
                                           std::optional<double> tolerance = std::nullopt) {
  if (g.edge_count() == 0) throw InputError("homogeneous_core: graph has no edges");
  const double tol = tolerance.value_or(level_tolerance(result));
  const double kappa = result.eta_star.min();
  std::vector<bool> at_min(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) at_min[e] = result.eta_star[e] <= kappa + tol;

  std::size_t count = 0;
  auto comp = component_labels(g, [&](EdgeId e) { return at_min[e]; }, &count);
  std::vector<std::vector<VertexId>> members(count);
  std::vector<bool> has_edge(count, false);
  for (VertexId v = 0; v < g.vertex_count(); ++v) members[comp[v]].push_back(v);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (at_min[e]) has_edge[comp[g.edge(e).u]] = true;
  }

  std::vector<Core> cores;
  for (std::size_t c = 0; c < count; ++c) {
    if (!has_edge[c]) continue;
    Core core;
    core.vertices = members[c];
    core.subgraph = vertex_induced_subgraph(g, core.vertices);
    core.kappa = kappa;
    for (EdgeId e : core.subgraph.parent_edge) {
      if (!at_min[e]) {
        throw NumericalError("homogeneous_core: vertex-induced closure adds an edge above the minimum eta level");
      }
    }
    cores.push_back(std::move(core));
  }
  return cores;
}

/// The core containing the least vertex among all minimum-level components.
inline Core homogeneous_core(const Multigraph& g, const ModulusResult& result,
                             std::optional<double> tolerance = std::nullopt) {
  return homogeneous_cores(g, result, tolerance).front();
}

struct DeflationLevel {
  double kappa = 0.0;
  Multigraph graph;  // graph at the start of this level
  ModulusResult solution;
  std::vector<Core> cores;
  Contraction shrink;  // graph / cores
  std::vector<EdgeId> original_edge;  // edge of `graph` -> edge of the input graph
};

/// Result of repeatedly shrinking homogeneous cores until one vertex remains.
struct DeflationHierarchy {
  std::vector<DeflationLevel> levels;
  std::vector<std::size_t> edge_level;  // original edge -> level index
  Multigraph terminal;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;

  /// Original edge ids of core `c` at level `l`, indexed by core-local edge id.
  std::vector<EdgeId> core_original_edges(std::size_t l, std::size_t c) const {
    const auto& level = levels.at(l);
    std::vector<EdgeId> out;
    for (EdgeId e : level.cores.at(c).subgraph.parent_edge) out.push_back(level.original_edge[e]);
    return out;
  }
};

/// Deflation: solve, take every minimum-η core, shrink them all, repeat.
/// Each level is solved from scratch on the shrunk graph.
inline DeflationHierarchy deflate(const Multigraph& g, const SolverConfig& cfg = {}) {
  if (g.edge_count() == 0) throw InputError("deflate: graph has no edges");
  require_connected(g, "deflate");
  DeflationHierarchy h;
  h.vertex_count = g.vertex_count();
  h.edge_count = g.edge_count();
  h.edge_level.assign(g.edge_count(), static_cast<std::size_t>(-1));

  Multigraph current = g;
  std::vector<EdgeId> to_original(g.edge_count());
  std::iota(to_original.begin(), to_original.end(), 0);
  double previous_kappa = -1.0;

  while (current.edge_count() > 0) {
    DeflationLevel level;
    level.solution = solve(current, cfg);
    level.cores = homogeneous_cores(current, level.solution);
    level.kappa = level.cores.front().kappa;
    if (!(level.kappa > previous_kappa)) {
      throw NumericalError("deflate: core levels are not strictly increasing");
    }
    previous_kappa = level.kappa;
    std::vector<std::vector<VertexId>> sets;
    for (const auto& core : level.cores) {
      sets.push_back(core.vertices);
      for (EdgeId e : core.subgraph.parent_edge) h.edge_level[to_original[e]] = h.levels.size();
    }
    level.shrink = contract_many(current, sets);
    level.graph = current;
    level.original_edge = to_original;

    std::vector<EdgeId> next_to_original(level.shrink.graph.edge_count());
    for (EdgeId f = 0; f < next_to_original.size(); ++f) next_to_original[f] = to_original[level.shrink.phi.inverse(f)];
    current = level.shrink.graph;
    to_original = std::move(next_to_original);
    h.levels.push_back(std::move(level));
  }
  h.terminal = current;
  if (h.terminal.vertex_count() != 1) throw NumericalError("deflate: terminal graph is not a single vertex");
  return h;
}

/// η(e) = κ of the level in which e was absorbed into a core.
inline EdgeVector eta_from_hierarchy(const DeflationHierarchy& h) {
  EdgeVector eta(h.edge_count, EdgeRole::Usage);
  for (EdgeId e = 0; e < h.edge_count; ++e) eta[e] = h.levels.at(h.edge_level.at(e)).kappa;
  return eta;
}

/// Serial rule: MEO(G) = Σ over cores of (|V_H| - 1)² / |E_H|.
inline double meo_from_hierarchy(const DeflationHierarchy& h) {
  double total = 0.0;
  for (const auto& level : h.levels) {
    for (const auto& core : level.cores) {
      const double n1 = static_cast<double>(core.subgraph.graph.vertex_count() - 1);
      total += n1 * n1 / static_cast<double>(core.subgraph.graph.edge_count());
    }
  }
  return total;
}

/// Optimal pmf on each core obtained by restricting that level's optimal
/// pmf to the core's edges (marginal law). Indexed [level][core], trees in
/// core-local edge ids.
inline std::vector<std::vector<TreePmf>> core_marginal_pmfs(const DeflationHierarchy& h) {
  std::vector<std::vector<TreePmf>> out;
  for (const auto& level : h.levels) {
    std::vector<TreePmf> per_core;
    for (const auto& core : level.cores) {
      std::vector<EdgeId> local(level.graph.edge_count(), kNoEdge);
      for (EdgeId i = 0; i < core.subgraph.parent_edge.size(); ++i) local[core.subgraph.parent_edge[i]] = i;
      std::vector<TreePmf::Entry> entries;
      for (const auto& [tree, p] : level.solution.mu) {
        std::vector<EdgeId> restricted;
        for (EdgeId e : tree) {
          if (local[e] != kNoEdge) restricted.push_back(local[e]);
        }
        SpanningTree piece(std::move(restricted));
        if (!is_spanning_tree(core.subgraph.graph, piece)) {
          throw NumericalError("core_marginal_pmfs: support tree does not restrict to a spanning tree of the core");
        }
        entries.push_back({std::move(piece), p});
      }
      per_core.emplace_back(std::move(entries), 1e-9);
    }
    out.push_back(std::move(per_core));
  }
  return out;
}

inline constexpr std::size_t kComposeSupportCap = 1'000'000;

/// Product coupling of per-core optimal pmfs, pulled back to trees of the
/// original graph through the level edge maps.
inline TreePmf compose_pmf(const DeflationHierarchy& h, const std::vector<std::vector<TreePmf>>& core_pmfs,
                           std::size_t support_cap = kComposeSupportCap) {
  if (core_pmfs.size() != h.levels.size()) throw InputError("compose_pmf: one pmf list per level required");
  struct Piece {
    const TreePmf* pmf;
    std::vector<EdgeId> to_original;
  };
  std::vector<Piece> pieces;
  std::size_t support = 1;
  for (std::size_t l = 0; l < h.levels.size(); ++l) {
    const auto& level = h.levels[l];
    if (core_pmfs[l].size() != level.cores.size()) throw InputError("compose_pmf: one pmf per core required");
    for (std::size_t c = 0; c < level.cores.size(); ++c) {
      const TreePmf& pmf = core_pmfs[l][c];
      for (const auto& entry : pmf) {
        if (!is_spanning_tree(level.cores[c].subgraph.graph, entry.tree)) {
          throw InputError("compose_pmf: level pmf supported outside the core's spanning trees");
        }
      }
      support *= pmf.size();
      if (support > support_cap) throw CapExceeded("compose_pmf: product support too large", support, support_cap);
      pieces.push_back({&pmf, h.core_original_edges(l, c)});
    }
  }

  std::vector<TreePmf::Entry> entries;
  entries.reserve(support);
  std::vector<EdgeId> edges;
  std::function<void(std::size_t, double)> recurse = [&](std::size_t i, double p) {
    if (i == pieces.size()) {
      entries.push_back({SpanningTree(edges), p});
      return;
    }
    for (const auto& [tree, q] : *pieces[i].pmf) {
      const std::size_t mark = edges.size();
      for (EdgeId e : tree) edges.push_back(pieces[i].to_original[e]);
      recurse(i + 1, p * q);
      edges.resize(mark);
    }
  };
  recurse(0, 1.0);
  return TreePmf(std::move(entries), 1e-9);
}

struct SerialBlock {
  std::vector<EdgeId> edges;  // original edge ids
  Subgraph subgraph;
  ModulusResult result;
  double meo = 0.0;
};

struct SerialDecomposition {
  std::vector<SerialBlock> blocks;
  double meo = 0.0;
  EdgeVector eta;
};

/// Solves every biconnected block on its own; MEO adds over blocks and η
/// is assembled blockwise.
inline SerialDecomposition serial_decompose(const Multigraph& g, const SolverConfig& cfg = {}) {
  SerialDecomposition out;
  out.eta = EdgeVector(g.edge_count(), EdgeRole::Usage);
  for (auto& block_edges : biconnected_components(g)) {
    SerialBlock block;
    block.subgraph = edge_subgraph(g, block_edges);
    block.result = solve(block.subgraph.graph, cfg);
    block.meo = meo_value(block.result);
    for (EdgeId i = 0; i < block.subgraph.parent_edge.size(); ++i) {
      out.eta[block.subgraph.parent_edge[i]] = block.result.eta_star[i];
    }
    block.edges = std::move(block_edges);
    out.meo += block.meo;
    out.blocks.push_back(std::move(block));
  }
  return out;
}

/// Densest connected vertex-induced subgraph, taken as the first
/// deflation core (least vertex among ties).
inline Core densest_subgraph(const Multigraph& g, const SolverConfig& cfg = {}) {
  return homogeneous_core(g, solve(g, cfg));
}

}  // namespace stmod
