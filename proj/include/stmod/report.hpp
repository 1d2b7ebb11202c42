#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stmod/brute_oracle.hpp"
#include "stmod/deflation.hpp"
#include "stmod/meo_analysis.hpp"
#include "stmod/modulus.hpp"
#include "stmod/multigraph.hpp"
#include "stmod/partitions.hpp"
#include "stmod/types.hpp"

namespace stmod::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// x rounded to 12 significant digits.
inline double sig12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline Json numbers(const EdgeVector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(sig12(x));
  return out;
}

inline Ratio reduced(Ratio r) {
  const std::size_t d = std::gcd(r.num, r.den);
  return d == 0 ? r : Ratio{r.num / d, r.den / d};
}

inline Json ratio(Ratio r) {
  r = reduced(r);
  return Json{{"num", r.num}, {"den", r.den}, {"value", sig12(r.value())}};
}

inline std::string ratio_text(Ratio r) {
  r = reduced(r);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

inline Json labels(const Multigraph& g, const std::vector<VertexId>& vertices) {
  Json out = Json::array();
  for (VertexId v : vertices) out.push_back(g.label(v));
  return out;
}

inline Json ids(std::span<const EdgeId> edges) {
  Json out = Json::array();
  for (EdgeId e : edges) out.push_back(e);
  return out;
}

inline Json graph_summary(const Multigraph& g) {
  Json edges = Json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back(Json::array({g.label(u), g.label(v)}));
  return Json{{"vertices", g.vertex_count()}, {"edges", g.edge_count()}, {"edge_list", std::move(edges)}};
}

inline Json pmf(const TreePmf& mu) {
  Json out = Json::array();
  for (const auto& [tree, p] : mu) out.push_back(Json{{"tree", ids(tree.edges())}, {"probability", sig12(p)}});
  return out;
}

inline Json header(const std::string& command, const Multigraph& g) {
  return Json{{"schema", kSchemaVersion}, {"command", command}, {"graph", graph_summary(g)}};
}

inline Json tolerances(const ModulusResult& r) {
  return Json{{"solver", r.config.tolerance},
              {"subproblem", r.config.subproblem_tolerance},
              {"grouping", sig12(level_tolerance(r))},
              {"homogeneity", kHomogeneityTolerance}};
}

inline Json solve_json(const Multigraph& g, const ModulusResult& r) {
  Json j = header("solve", g);
  j["tolerances"] = tolerances(r);
  j["mod2"] = sig12(r.mod2);
  j["meo"] = sig12(meo_value(r));
  j["iterations"] = r.iterations;
  j["worst_violation"] = sig12(r.worst_violation);
  j["eta"] = numbers(r.eta_star);
  j["rho"] = numbers(r.rho_star);
  j["homogeneous"] = is_homogeneous(g, r).homogeneous;
  j["uniform"] = is_uniform(g, r);
  j["pmf"] = pmf(r.mu);
  return j;
}

inline Json hierarchy_json(const Multigraph& g, const DeflationHierarchy& h) {
  Json levels = Json::array();
  for (std::size_t l = 0; l < h.levels.size(); ++l) {
    const auto& level = h.levels[l];
    Json cores = Json::array();
    for (std::size_t c = 0; c < level.cores.size(); ++c) {
      const auto& core = level.cores[c];
      cores.push_back(Json{{"vertices", core.subgraph.graph.labels()},
                           {"edges", ids(h.core_original_edges(l, c))},
                           {"theta", ratio(core.theta())}});
    }
    levels.push_back(Json{{"kappa", sig12(level.kappa)},
                          {"vertices", level.graph.vertex_count()},
                          {"edges", level.graph.edge_count()},
                          {"cores", std::move(cores)}});
  }
  Json j = header("deflate", g);
  j["levels"] = std::move(levels);
  j["edge_level"] = h.edge_level;
  j["eta"] = numbers(eta_from_hierarchy(h));
  j["meo"] = sig12(meo_from_hierarchy(h));
  return j;
}

inline Json partition_json(const Multigraph& g, const FeasiblePartition& p) {
  Json blocks = Json::array();
  for (const auto& block : p.partition.blocks()) blocks.push_back(labels(g, block));
  return Json{{"blocks", std::move(blocks)}, {"cut_edges", ids(p.cut_edges)}, {"weight", ratio(p.weight)}};
}

inline Json oracle_json(const Multigraph& g, const OracleReport& r) {
  Json j = header("oracle", g);
  j["agree"] = r.all_agree();
  j["tree_count"] = r.tree_count;
  j["exact_meo"] = sig12(r.exact_meo);
  j["exact_mod2"] = sig12(r.exact_mod2);
  j["exact_eta"] = numbers(r.exact_eta);
  j["fast_meo"] = sig12(r.fast_meo);
  j["fast_eta"] = numbers(r.fast_eta);
  Json trees = Json::array();
  for (const auto& t : r.trees) trees.push_back(ids(t.edges()));
  j["trees"] = std::move(trees);
  j["fair"] = r.fair;
  j["forbidden"] = r.forbidden;
  j["tight_forbidden"] = r.tight_forbidden;
  j["min_partition"] = r.min_partition ? partition_json(g, *r.min_partition) : Json(nullptr);
  if (r.densest) {
    Json sets = Json::array();
    for (const auto& s : r.densest->vertex_sets) sets.push_back(labels(g, s));
    j["densest"] = Json{{"theta", ratio(r.densest->theta)}, {"vertex_sets", std::move(sets)}};
  } else {
    j["densest"] = nullptr;
  }
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back(Json{{"name", c.name},
                          {"passed", c.passed},
                          {"skipped", c.skipped},
                          {"deviation", sig12(c.deviation)},
                          {"tolerance", c.tolerance},
                          {"note", c.note}});
  }
  j["checks"] = std::move(checks);
  return j;
}

// ---- text rendering ----

inline std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::string edge_name(const Multigraph& g, EdgeId e) {
  return g.label(g.edge(e).u) + "-" + g.label(g.edge(e).v);
}

inline std::string solve_text(const Multigraph& g, const ModulusResult& r) {
  std::ostringstream out;
  out << "graph: " << g.vertex_count() << " vertices, " << g.edge_count() << " edges\n";
  out << "mod2: " << fixed(r.mod2, 10) << "\nmeo:  " << fixed(meo_value(r), 10) << "\n";
  out << "iterations: " << r.iterations << ", worst violation " << r.worst_violation << "\n";
  out << "homogeneous: " << (is_homogeneous(g, r).homogeneous ? "yes" : "no")
      << ", uniform: " << (is_uniform(g, r) ? "yes" : "no") << "\n";
  out << "eta*:\n";
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    out << "  " << e << " " << edge_name(g, e) << " " << fixed(r.eta_star[e]) << "\n";
  }
  out << "pmf support: " << r.mu.size() << " trees\n";
  for (const auto& [tree, p] : r.mu) {
    out << "  " << fixed(p) << " {";
    for (EdgeId e : tree) out << (e == *tree.begin() ? "" : " ") << e;
    out << "}\n";
  }
  return out.str();
}

inline std::string hierarchy_text(const Multigraph& g, const DeflationHierarchy& h) {
  std::ostringstream out;
  out << "graph: " << g.vertex_count() << " vertices, " << g.edge_count() << " edges\n";
  out << "levels: " << h.levels.size() << ", meo " << fixed(meo_from_hierarchy(h), 10) << "\n";
  for (std::size_t l = 0; l < h.levels.size(); ++l) {
    const auto& level = h.levels[l];
    out << "level " << l << ": kappa " << fixed(level.kappa) << " on " << level.graph.vertex_count() << " vertices, "
        << level.graph.edge_count() << " edges\n";
    for (const auto& core : level.cores) {
      out << "  core theta " << ratio_text(core.theta()) << ":";
      for (const auto& label : core.subgraph.graph.labels()) out << " " << label;
      out << "\n";
    }
  }
  return out.str();
}

inline std::string partition_text(const Multigraph& g, const FeasiblePartition& p, double max_eta) {
  std::ostringstream out;
  out << "minimum feasible partition: " << p.block_count() << " blocks, weight " << ratio_text(p.weight)
      << " (1/max eta* = " << fixed(1.0 / max_eta) << ")\n";
  for (const auto& block : p.partition.blocks()) {
    out << "  {";
    for (std::size_t i = 0; i < block.size(); ++i) out << (i ? " " : "") << g.label(block[i]);
    out << "}\n";
  }
  out << "cut edges:";
  for (EdgeId e : p.cut_edges) out << " " << edge_name(g, e);
  out << "\n";
  return out.str();
}

inline std::string oracle_text(const Multigraph& g, const OracleReport& r) {
  std::ostringstream out;
  out << "trees: " << r.tree_count << " (" << r.fair.size() << " fair, " << r.forbidden.size() << " forbidden, "
      << r.tight_forbidden << " forbidden but tight)\n";
  out << "exact meo " << fixed(r.exact_meo, 10) << ", exact mod2 " << fixed(r.exact_mod2, 10) << ", fast meo "
      << fixed(r.fast_meo, 10) << "\n";
  if (r.min_partition) out << "min partition weight " << ratio_text(r.min_partition->weight) << "\n";
  if (r.densest) {
    out << "densest subgraphs (theta " << ratio_text(r.densest->theta) << "):\n";
    for (const auto& s : r.densest->vertex_sets) {
      out << "  {";
      for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << g.label(s[i]);
      out << "}\n";
    }
  }
  for (const auto& c : r.checks) {
    out << (c.skipped ? "SKIP " : c.passed ? "ok   " : "FAIL ") << c.name;
    if (!c.skipped && c.tolerance > 0.0) out << " (deviation " << c.deviation << ", tolerance " << c.tolerance << ")";
    if (!c.note.empty()) out << " - " << c.note;
    out << "\n";
  }
  out << (r.all_agree() ? "all checks agree\n" : "DISAGREEMENT\n");
  return out.str();
}

// ---- DOT ----

struct EtaBucket {
  double eta = 0.0;
  std::vector<EdgeId> edges;
};

/// Groups edges whose η values lie within `tol` of the bucket's smallest
/// value. Buckets are ordered by increasing η.
inline std::vector<EtaBucket> eta_buckets(const EdgeVector& eta, double tol) {
  std::vector<EdgeId> order(eta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) { return eta[a] < eta[b]; });
  std::vector<EtaBucket> out;
  for (EdgeId e : order) {
    if (out.empty() || eta[e] > out.back().eta + tol) out.push_back({eta[e], {}});
    out.back().edges.push_back(e);
  }
  for (auto& b : out) std::sort(b.edges.begin(), b.edges.end());
  return out;
}

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::string export_dot(const Multigraph& g, const EdgeVector& eta, double tol) {
  if (eta.size() != g.edge_count()) throw InputError("export_dot: eta length does not match edge count");
  static constexpr const char* kStyles[] = {"solid", "dashed", "dotted", "bold"};
  static constexpr const char* kColors[] = {"#1b5e20", "#0d47a1", "#b71c1c", "#e65100",
                                            "#4a148c", "#006064", "#3e2723", "#263238"};
  const auto buckets = eta_buckets(eta, tol);
  std::vector<std::size_t> bucket_of(g.edge_count());
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    for (EdgeId e : buckets[b].edges) bucket_of[e] = b;
  }
  std::ostringstream out;
  out << "graph G {\n  node [shape=circle];\n";
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    out << "  // bucket " << b << ": eta " << fixed(buckets[b].eta, 4) << ", " << buckets[b].edges.size()
        << " edges, style " << kStyles[b % 4] << ", color " << kColors[b % 8] << "\n";
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) out << "  " << dot_quote(g.label(v)) << ";\n";
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const std::size_t b = bucket_of[e];
    out << "  " << dot_quote(g.label(g.edge(e).u)) << " -- " << dot_quote(g.label(g.edge(e).v)) << " [label=\""
        << fixed(eta[e], 4) << "\", style=" << kStyles[b % 4] << ", color=\"" << kColors[b % 8] << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

inline std::string export_dot(const Multigraph& g, const ModulusResult& r) {
  return export_dot(g, r.eta_star, level_tolerance(r));
}

inline std::string export_dot(const Multigraph& g, const DeflationHierarchy& h) {
  double tol = 1e-10;
  for (const auto& level : h.levels) tol = std::max(tol, level_tolerance(level.solution));
  return export_dot(g, eta_from_hierarchy(h), tol);
}

}  // namespace stmod::report
