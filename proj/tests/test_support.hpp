#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stmod/stmod.hpp"

namespace stmod::testing {

inline std::string data_path(const std::string& name) { return std::string(STMOD_DATA_DIR) + "/" + name + ".txt"; }

inline Multigraph load_fixture(const std::string& name) {
  std::ifstream in(data_path(name));
  if (!in) throw InputError("missing fixture " + name);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_edge_list(buf.str());
}

/// Every fixture in the data directory, by stem, sorted.
inline std::vector<std::string> corpus_names() {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(STMOD_DATA_DIR)) {
    if (entry.path().extension() == ".txt") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Multigraph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) edges.push_back({u, v});
  }
  return Multigraph::with_vertices(n, edges);
}

inline Multigraph cycle_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (VertexId v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n});
  return Multigraph::with_vertices(n, edges);
}

/// Random connected multigraph: a random spanning tree plus extra edges
/// (parallel edges allowed), redrawn until it has at most `max_trees`
/// spanning trees.
inline Multigraph random_connected(std::mt19937_64& rng, std::size_t min_n, std::size_t max_n,
                                   std::size_t max_trees) {
  while (true) {
    const std::size_t n = min_n + rng() % (max_n - min_n + 1);
    std::vector<Edge> edges;
    for (VertexId v = 1; v < n; ++v) edges.push_back({static_cast<VertexId>(rng() % v), v});
    const std::size_t extra = rng() % (2 * n);
    for (std::size_t k = 0; k < extra; ++k) {
      const VertexId u = rng() % n, v = rng() % n;
      if (u != v) edges.push_back({u, v});
    }
    std::shuffle(edges.begin(), edges.end(), rng);
    Multigraph g = Multigraph::with_vertices(n, edges);
    if (count_trees(g) <= max_trees) return g;
  }
}

/// Random pmf over a random subset of the spanning trees of g.
inline TreePmf random_pmf(const Multigraph& g, std::mt19937_64& rng, std::size_t cap = 5000) {
  const auto trees = enumerate_trees(g, cap);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SpanningTree> chosen;
  std::vector<double> weights;
  for (const auto& t : trees) {
    if (chosen.empty() || unit(rng) < 0.5) {
      chosen.push_back(t);
      weights.push_back(unit(rng) + 1e-3);
    }
  }
  return TreePmf::normalized(std::move(chosen), weights);
}

}  // namespace stmod::testing
