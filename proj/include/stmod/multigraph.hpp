#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stmod/types.hpp"

namespace stmod {

struct Edge {
  VertexId u;
  VertexId v;
};

/// Undirected multigraph: parallel edges allowed, self loops rejected.
///
/// Vertices carry string labels; internally they are the dense indices
/// 0..n-1 in the order supplied. Edge ids are the dense indices 0..m-1.
/// Instances are immutable once built.
class Multigraph {
 public:
  Multigraph() = default;

  Multigraph(std::vector<std::string> labels, std::vector<Edge> edges)
      : labels_(std::move(labels)), edges_(std::move(edges)), incident_(labels_.size()) {
    for (VertexId v = 0; v < labels_.size(); ++v) {
      auto [it, inserted] = index_.emplace(labels_[v], v);
      if (!inserted) throw InputError("duplicate vertex label '" + labels_[v] + "'");
    }
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      const auto [u, v] = edges_[e];
      if (u >= labels_.size() || v >= labels_.size()) {
        throw InputError("edge " + std::to_string(e) + " has an endpoint out of range");
      }
      if (u == v) throw InputError("self loop at vertex '" + labels_[u] + "'");
      incident_[u].push_back(e);
      incident_[v].push_back(e);
    }
  }

  /// Vertices labelled "0".."n-1".
  static Multigraph with_vertices(std::size_t n, std::vector<Edge> edges) {
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
    return Multigraph(std::move(labels), std::move(edges));
  }

  std::size_t vertex_count() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const std::string& label(VertexId v) const { return labels_.at(v); }
  std::span<const std::string> labels() const noexcept { return labels_; }
  std::span<const EdgeId> incident(VertexId v) const { return incident_.at(v); }

  VertexId other(EdgeId e, VertexId v) const {
    const Edge& ed = edges_.at(e);
    return ed.u == v ? ed.v : ed.u;
  }

  std::optional<VertexId> find_vertex(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> incident_;
  std::unordered_map<std::string, VertexId> index_;
};

/// Largest multiplicity-expanded edge count accepted by the parser.
inline constexpr std::size_t kDefaultEdgeCap = 2'000'000;

/// Parses the edge-list format: one "u v" or "u v mult" per line, `#`
/// starts a comment, blank lines are skipped. Weighted lines expand into
/// `mult` parallel edges. Vertices are indexed in first-seen order.
inline Multigraph from_edge_list(std::string_view text, std::size_t edge_cap = kDefaultEdgeCap) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, VertexId> index;
  std::vector<Edge> edges;
  auto vertex_of = [&](const std::string& label) {
    auto [it, inserted] = index.emplace(label, labels.size());
    if (inserted) labels.push_back(label);
    return it->second;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::istringstream fields{std::string(line)};
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;

    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (tokens.size() != 2 && tokens.size() != 3) {
      throw InputError(where + "expected 'u v' or 'u v mult'");
    }
    std::size_t mult = 1;
    if (tokens.size() == 3) {
      long long parsed = 0;
      const auto& t = tokens[2];
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), parsed);
      if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw InputError(where + "multiplicity '" + t + "' is not an integer");
      }
      if (parsed <= 0) throw InputError(where + "multiplicity must be positive");
      mult = static_cast<std::size_t>(parsed);
    }
    if (tokens[0] == tokens[1]) throw InputError(where + "self loop at '" + tokens[0] + "'");
    if (edges.size() + mult > edge_cap) {
      throw CapExceeded(where + "expanded edge count exceeds cap", edges.size() + mult, edge_cap);
    }
    const VertexId u = vertex_of(tokens[0]);
    const VertexId v = vertex_of(tokens[1]);
    for (std::size_t k = 0; k < mult; ++k) edges.push_back({u, v});
  }
  if (edges.empty()) throw InputError("edge list contains no edges");
  return Multigraph(std::move(labels), std::move(edges));
}

/// Serializes one "u v" line per edge, in edge-id order.
inline std::string to_edge_list(const Multigraph& g) {
  std::string out;
  for (const auto& [u, v] : g.edges()) {
    out += g.label(u);
    out += ' ';
    out += g.label(v);
    out += '\n';
  }
  return out;
}

/// Connected-component index per vertex, considering only edges for which
/// `keep(e)` is true. Components are numbered in order of least vertex.
template <class EdgeFilter>
std::vector<std::size_t> component_labels(const Multigraph& g, EdgeFilter keep, std::size_t* count = nullptr) {
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> comp(g.vertex_count(), unset);
  std::size_t next = 0;
  std::vector<VertexId> stack;
  for (VertexId root = 0; root < g.vertex_count(); ++root) {
    if (comp[root] != unset) continue;
    comp[root] = next;
    stack.push_back(root);
    while (!stack.empty()) {
      VertexId x = stack.back();
      stack.pop_back();
      for (EdgeId e : g.incident(x)) {
        if (!keep(e)) continue;
        VertexId y = g.other(e, x);
        if (comp[y] == unset) {
          comp[y] = next;
          stack.push_back(y);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

inline bool is_connected(const Multigraph& g) {
  std::size_t count = 0;
  component_labels(g, [](EdgeId) { return true; }, &count);
  return count <= 1;
}

inline void require_connected(const Multigraph& g, const char* who) {
  if (!is_connected(g)) throw InputError(std::string(who) + ": graph is not connected");
}

/// Biconnected components as sorted edge-id blocks, ordered by least edge id.
/// Parallel edges between the same pair land in the same block.
inline std::vector<std::vector<EdgeId>> biconnected_components(const Multigraph& g) {
  require_connected(g, "biconnected_components");
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<EdgeId>> blocks;
  if (g.edge_count() == 0) return blocks;

  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> disc(n, unset), low(n, 0);
  std::vector<EdgeId> edge_stack;
  struct Frame {
    VertexId v;
    EdgeId via;
    std::size_t next;
  };
  std::vector<Frame> stack;
  std::size_t time = 0;

  stack.push_back({0, kNoEdge, 0});
  disc[0] = low[0] = time++;
  while (!stack.empty()) {
    Frame& f = stack.back();
    auto inc = g.incident(f.v);
    if (f.next < inc.size()) {
      EdgeId e = inc[f.next++];
      if (e == f.via) continue;
      VertexId w = g.other(e, f.v);
      if (disc[w] == unset) {
        edge_stack.push_back(e);
        disc[w] = low[w] = time++;
        stack.push_back({w, e, 0});
      } else if (disc[w] < disc[f.v]) {
        edge_stack.push_back(e);
        low[f.v] = std::min(low[f.v], disc[w]);
      }
      continue;
    }
    const Frame done = f;
    stack.pop_back();
    if (stack.empty()) break;
    VertexId parent = stack.back().v;
    low[parent] = std::min(low[parent], low[done.v]);
    if (low[done.v] >= disc[parent]) {
      std::vector<EdgeId> block;
      while (true) {
        EdgeId e = edge_stack.back();
        edge_stack.pop_back();
        block.push_back(e);
        if (e == done.via) break;
      }
      std::sort(block.begin(), block.end());
      blocks.push_back(std::move(block));
    }
  }
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return blocks;
}

/// A subgraph together with the ids it had in its parent graph.
struct Subgraph {
  Multigraph graph;
  std::vector<VertexId> parent_vertex;  // local vertex -> parent vertex
  std::vector<EdgeId> parent_edge;      // local edge -> parent edge
};

namespace detail {

inline std::vector<VertexId> normalize_vertex_set(const Multigraph& g, std::span<const VertexId> vertices,
                                                  const char* who) {
  if (vertices.empty()) throw InputError(std::string(who) + ": empty vertex set");
  std::vector<VertexId> sorted(vertices.begin(), vertices.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.back() >= g.vertex_count()) throw InputError(std::string(who) + ": unknown vertex");
  return sorted;
}

}  // namespace detail

/// Subgraph on `vertices` keeping every edge with both endpoints inside.
/// Vertex and edge order follow the parent's ids.
inline Subgraph vertex_induced_subgraph(const Multigraph& g, std::span<const VertexId> vertices) {
  auto sorted = detail::normalize_vertex_set(g, vertices, "vertex_induced_subgraph");
  constexpr std::size_t absent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> local(g.vertex_count(), absent);
  std::vector<std::string> labels;
  for (VertexId v : sorted) {
    local[v] = labels.size();
    labels.push_back(g.label(v));
  }
  Subgraph out;
  std::vector<Edge> edges;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [u, v] = g.edge(e);
    if (local[u] != absent && local[v] != absent) {
      edges.push_back({local[u], local[v]});
      out.parent_edge.push_back(e);
    }
  }
  out.parent_vertex = std::move(sorted);
  out.graph = Multigraph(std::move(labels), std::move(edges));
  return out;
}

/// Subgraph formed by a set of edges and their endpoints.
inline Subgraph edge_subgraph(const Multigraph& g, std::span<const EdgeId> edge_ids) {
  std::vector<EdgeId> sorted(edge_ids.begin(), edge_ids.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<VertexId> vertices;
  for (EdgeId e : sorted) {
    vertices.push_back(g.edge(e).u);
    vertices.push_back(g.edge(e).v);
  }
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  constexpr std::size_t absent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> local(g.vertex_count(), absent);
  std::vector<std::string> labels;
  for (VertexId v : vertices) {
    local[v] = labels.size();
    labels.push_back(g.label(v));
  }
  std::vector<Edge> edges;
  for (EdgeId e : sorted) edges.push_back({local[g.edge(e).u], local[g.edge(e).v]});
  Subgraph out;
  out.graph = Multigraph(std::move(labels), std::move(edges));
  out.parent_vertex = std::move(vertices);
  out.parent_edge = std::move(sorted);
  return out;
}

/// Bijection between the edges of G that survive a contraction and the
/// edges of the contracted graph.
class EdgeBijection {
 public:
  EdgeBijection() = default;
  EdgeBijection(std::vector<EdgeId> forward, std::size_t image_size) : forward_(std::move(forward)) {
    inverse_.assign(image_size, kNoEdge);
    for (EdgeId e = 0; e < forward_.size(); ++e) {
      if (forward_[e] == kNoEdge) continue;
      if (forward_[e] >= image_size || inverse_[forward_[e]] != kNoEdge) {
        throw NumericalError("edge bijection: map is not injective");
      }
      inverse_[forward_[e]] = e;
    }
    for (EdgeId f : inverse_) {
      if (f == kNoEdge) throw NumericalError("edge bijection: map is not onto");
    }
  }

  /// True when `e` survives the contraction.
  bool in_domain(EdgeId e) const { return e < forward_.size() && forward_[e] != kNoEdge; }
  EdgeId forward(EdgeId e) const {
    if (!in_domain(e)) throw InputError("edge bijection: edge outside domain");
    return forward_[e];
  }
  EdgeId inverse(EdgeId f) const { return inverse_.at(f); }
  std::size_t domain_size() const noexcept { return inverse_.size(); }
  std::size_t source_edge_count() const noexcept { return forward_.size(); }

 private:
  std::vector<EdgeId> forward_;
  std::vector<EdgeId> inverse_;
};

struct Contraction {
  Multigraph graph;
  EdgeBijection phi;
  std::vector<VertexId> vertex_map;   // vertex of G -> vertex of G/H
  std::vector<VertexId> core_vertex;  // one per contracted core
};

/// Shrinks each of the given disjoint vertex sets to a single vertex.
/// Every set must induce a connected subgraph. Edges inside a set are
/// dropped; all other edges keep their multiplicity. A contracted vertex
/// takes the position of its least member and is labelled "*<label>".
inline Contraction contract_many(const Multigraph& g, const std::vector<std::vector<VertexId>>& cores) {
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> core_of(g.vertex_count(), none);
  for (std::size_t c = 0; c < cores.size(); ++c) {
    auto sorted = detail::normalize_vertex_set(g, cores[c], "contract");
    for (VertexId v : sorted) {
      if (core_of[v] != none) throw InputError("contract: cores overlap");
      core_of[v] = c;
    }
    auto sub = vertex_induced_subgraph(g, sorted);
    if (!is_connected(sub.graph)) throw InputError("contract: vertex set does not induce a connected subgraph");
  }

  Contraction out;
  out.vertex_map.assign(g.vertex_count(), none);
  out.core_vertex.assign(cores.size(), none);
  std::vector<std::string> labels;
  std::unordered_map<std::string, bool> taken;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (core_of[v] == none) taken[g.label(v)] = true;
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const std::size_t c = core_of[v];
    if (c == none) {
      out.vertex_map[v] = labels.size();
      labels.push_back(g.label(v));
    } else if (out.core_vertex[c] == none) {
      std::string name = "*" + g.label(v);
      while (taken.count(name)) name += '\'';
      taken[name] = true;
      out.core_vertex[c] = labels.size();
      labels.push_back(std::move(name));
    }
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (core_of[v] != none) out.vertex_map[v] = out.core_vertex[core_of[v]];
  }

  std::vector<Edge> edges;
  std::vector<EdgeId> forward(g.edge_count(), kNoEdge);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const VertexId a = out.vertex_map[g.edge(e).u];
    const VertexId b = out.vertex_map[g.edge(e).v];
    if (a == b) continue;
    forward[e] = edges.size();
    edges.push_back({a, b});
  }
  const std::size_t image = edges.size();
  out.graph = Multigraph(std::move(labels), std::move(edges));
  out.phi = EdgeBijection(std::move(forward), image);
  return out;
}

/// G/H for a single connected vertex set H.
inline Contraction contract(const Multigraph& g, std::span<const VertexId> core) {
  return contract_many(g, {std::vector<VertexId>(core.begin(), core.end())});
}

}  // namespace stmod
