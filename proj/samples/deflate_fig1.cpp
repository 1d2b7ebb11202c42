// Solves the three-layer ring graph, deflates it, and prints each level
// next to the serial MEO total.

#include <cstdio>
#include <fstream>
#include <sstream>

#include "stmod/stmod.hpp"

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : STMOD_DATA_DIR "/fig1.txt";
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  const auto g = stmod::from_edge_list(text.str());

  const auto result = stmod::solve(g);
  std::printf("%zu vertices, %zu edges, MEO %.10f after %zu iterations\n", g.vertex_count(), g.edge_count(),
              stmod::meo_value(result), result.iterations);

  const auto h = stmod::deflate(g);
  for (std::size_t l = 0; l < h.levels.size(); ++l) {
    const auto& level = h.levels[l];
    for (const auto& core : level.cores) {
      std::printf("level %zu  kappa %.6f  core |V|=%zu |E|=%zu\n", l, level.kappa, core.subgraph.graph.vertex_count(),
                  core.subgraph.graph.edge_count());
    }
  }
  std::printf("serial MEO %.10f\n", stmod::meo_from_hierarchy(h));
}
