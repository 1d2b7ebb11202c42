#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stmod/deflation.hpp"
#include "stmod/meo_analysis.hpp"
#include "stmod/modulus.hpp"
#include "stmod/multigraph.hpp"
#include "stmod/oracle_solvers.hpp"
#include "stmod/partitions.hpp"
#include "stmod/tree_oracle.hpp"
#include "stmod/types.hpp"

namespace stmod {

inline constexpr std::size_t kOracleTreeCap = 2000;

/// All spanning trees in enumeration order with the usage matrix N
/// (rows = trees, columns = edges).
struct TreeFamily {
  std::vector<SpanningTree> trees;
  Eigen::MatrixXd usage;

  std::size_t size() const noexcept { return trees.size(); }

  std::optional<std::size_t> index_of(const SpanningTree& tree) const {
    auto it = std::lower_bound(trees.begin(), trees.end(), tree);
    if (it == trees.end() || *it != tree) return std::nullopt;
    return static_cast<std::size_t>(it - trees.begin());
  }
};

inline TreeFamily tree_family(const Multigraph& g, std::size_t cap = kOracleTreeCap) {
  if (g.edge_count() == 0) throw InputError("tree_family: graph has no edges");
  TreeFamily family;
  family.trees = enumerate_trees(g, cap);
  std::sort(family.trees.begin(), family.trees.end());
  const auto rows = static_cast<Eigen::Index>(family.trees.size());
  family.usage = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(g.edge_count()));
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (EdgeId e : family.trees[static_cast<std::size_t>(i)]) family.usage(i, static_cast<Eigen::Index>(e)) = 1.0;
  }
  return family;
}

struct ExactMeo {
  double value = 0.0;
  TreePmf mu;
  EdgeVector eta;
};

/// min μᵀNNᵀμ over the probability simplex, i.e. the minimum-norm point
/// of the convex hull of the tree indicator vectors.
inline ExactMeo exact_meo(const TreeFamily& family) {
  const auto mnp = oracle::min_norm_point(family.usage);
  ExactMeo out;
  out.value = mnp.point.squaredNorm();
  out.eta = EdgeVector(std::vector<double>(mnp.point.data(), mnp.point.data() + mnp.point.size()), EdgeRole::Usage);
  std::vector<SpanningTree> trees;
  std::vector<double> weights;
  for (const auto& [row, w] : mnp.weights) {
    trees.push_back(family.trees[row]);
    weights.push_back(w);
  }
  out.mu = TreePmf::normalized(std::move(trees), weights);
  return out;
}

inline ExactMeo exact_meo(const Multigraph& g, std::size_t cap = kOracleTreeCap) {
  return exact_meo(tree_family(g, cap));
}

struct ExactMod2 {
  double value = 0.0;
  EdgeVector rho;
};

/// min Σρ² subject to Nρ ≥ 1 over the full tree family.
inline ExactMod2 exact_mod2(const TreeFamily& family) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(family.usage.rows());
  const Eigen::VectorXd rho = oracle::least_distance(family.usage, ones);
  ExactMod2 out;
  out.value = rho.squaredNorm();
  out.rho = EdgeVector(std::vector<double>(rho.data(), rho.data() + rho.size()), EdgeRole::Density);
  return out;
}

inline ExactMod2 exact_mod2(const Multigraph& g, std::size_t cap = kOracleTreeCap) {
  return exact_mod2(tree_family(g, cap));
}

inline constexpr double kFairThreshold = 1e-9;

struct FairSplit {
  std::vector<std::size_t> fair;       // indices into the tree family
  std::vector<std::size_t> forbidden;
};

/// Tree γ is fair iff max μ(γ) over {μ ≥ 0 : Σμ = 1, Nᵀμ = η*} exceeds
/// 1e-9. Rather than one LP per tree, repeatedly maximize the total mass on
/// trees not yet known to be fair; every tree with positive mass in an
/// optimum is fair, and once that total is zero the rest are forbidden.
inline FairSplit fair_trees(const TreeFamily& family, const EdgeVector& eta) {
  const auto trees = static_cast<Eigen::Index>(family.size());
  const auto m = family.usage.cols();
  if (static_cast<Eigen::Index>(eta.size()) != m) throw InputError("fair_trees: eta does not match the tree family");
  Eigen::MatrixXd a(m + 1, trees);
  a.topRows(m) = family.usage.transpose();
  a.row(m).setOnes();
  Eigen::VectorXd b(m + 1);
  for (Eigen::Index e = 0; e < m; ++e) b(e) = eta[static_cast<EdgeId>(e)];
  b(m) = 1.0;

  oracle::EqualityLp lp(a, b);
  if (!lp.feasible()) throw NumericalError("fair_trees: eta is not the usage of any pmf on the tree family");
  std::vector<bool> fair(static_cast<std::size_t>(trees), false);
  auto single_tree = [&](Eigen::Index t) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(trees);
    c(t) = 1.0;
    return lp.maximize(c);
  };

  while (true) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(trees);
    for (Eigen::Index t = 0; t < trees; ++t) c(t) = fair[t] ? 0.0 : 1.0;
    if (c.sum() == 0.0) break;
    const auto best = lp.maximize(c);
    if (best.objective <= kFairThreshold) break;
    bool progress = false;
    for (Eigen::Index t = 0; t < trees; ++t) {
      if (!fair[t] && best.x(t) > kFairThreshold) fair[t] = progress = true;
    }
    if (!progress) {
      // Mass spread too thinly to classify; settle the remaining trees one by one.
      for (Eigen::Index t = 0; t < trees; ++t) {
        if (!fair[t] && single_tree(t).objective > kFairThreshold) fair[t] = true;
      }
      break;
    }
  }

  FairSplit out;
  for (Eigen::Index t = 0; t < trees; ++t) (fair[t] ? out.fair : out.forbidden).push_back(static_cast<std::size_t>(t));
  return out;
}

inline FairSplit fair_trees(const Multigraph& g, std::size_t cap = kOracleTreeCap) {
  const TreeFamily family = tree_family(g, cap);
  return fair_trees(family, exact_meo(family).eta);
}

/// Global minimum of w(P) over all feasible partitions; the first one in
/// enumeration order among ties.
inline FeasiblePartition min_partition_exhaustive(const Multigraph& g, std::size_t vertex_cap = kPartitionVertexCap) {
  if (g.vertex_count() < 2) throw InputError("min_partition_exhaustive: need at least two vertices");
  require_connected(g, "min_partition_exhaustive");
  std::optional<VertexPartition> best;
  Ratio best_weight;
  for_each_feasible_partition(g, vertex_cap, [&](const VertexPartition& p) {
    const Ratio w{detail::crossing_edges(g, p).size(), p.block_count() - 1};
    if (!best || w < best_weight) {
      best = p;
      best_weight = w;
    }
  });
  return validate_feasible(g, *best);
}

struct DensestSubgraphs {
  Ratio theta;
  std::vector<std::vector<VertexId>> vertex_sets;  // every maximizer, in subset order
};

/// Exhaustive maximization of θ(H) = |E_H|/(|V_H|-1) over connected
/// vertex-induced subgraphs with at least one edge.
inline DensestSubgraphs densest_subgraph_exhaustive(const Multigraph& g, std::size_t vertex_cap = kPartitionVertexCap) {
  const std::size_t n = g.vertex_count();
  if (n > vertex_cap) throw CapExceeded("densest_subgraph_exhaustive: too many vertices", n, vertex_cap);
  if (g.edge_count() == 0) throw InputError("densest_subgraph_exhaustive: graph has no edges");
  DensestSubgraphs out;
  bool found = false;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<VertexId> members;
    for (VertexId v = 0; v < n; ++v) {
      if (mask >> v & 1) members.push_back(v);
    }
    if (members.size() < 2) continue;
    std::size_t edges = 0;
    UnionFind uf(n);
    std::size_t merges = 0;
    for (const auto& [u, v] : g.edges()) {
      if ((mask >> u & 1) && (mask >> v & 1)) {
        ++edges;
        if (uf.unite(u, v)) ++merges;
      }
    }
    if (merges + 1 != members.size()) continue;
    const Ratio theta{edges, members.size() - 1};
    if (!found || theta > out.theta) {
      found = true;
      out.theta = theta;
      out.vertex_sets.clear();
    }
    if (theta == out.theta) out.vertex_sets.push_back(std::move(members));
  }
  return out;
}

class OracleDisagreement : public Error {
 public:
  using Error::Error;
};

struct OracleCheck {
  std::string name;
  bool passed = true;
  bool skipped = false;
  double deviation = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct OracleReport {
  std::size_t tree_count = 0;
  double exact_meo = 0.0;
  double exact_mod2 = 0.0;
  EdgeVector exact_eta;
  EdgeVector exact_rho;
  TreePmf exact_mu;
  std::vector<SpanningTree> trees;
  std::vector<std::size_t> fair;
  std::vector<std::size_t> forbidden;
  /// Forbidden trees that are nevertheless ρ*-tight.
  std::size_t tight_forbidden = 0;
  std::optional<FeasiblePartition> min_partition;
  std::optional<DensestSubgraphs> densest;

  double fast_meo = 0.0;
  EdgeVector fast_eta;
  std::vector<OracleCheck> checks;

  bool all_agree() const {
    return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
  }

  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
      if (!c.passed) out.push_back(c.name + (c.note.empty() ? "" : ": " + c.note));
    }
    return out;
  }
};

struct OracleConfig {
  std::size_t tree_cap = kOracleTreeCap;
  std::size_t vertex_cap = kPartitionVertexCap;
  SolverConfig solver;
};

namespace detail {

inline double max_abs_diff(const EdgeVector& a, const EdgeVector& b) {
  double out = 0.0;
  for (EdgeId e = 0; e < a.size(); ++e) out = std::max(out, std::abs(a[e] - b[e]));
  return out;
}

inline OracleCheck measured(std::string name, double deviation, double tolerance) {
  OracleCheck c{std::move(name), deviation <= tolerance, false, deviation, tolerance, {}};
  return c;
}

inline OracleCheck verdict(std::string name, bool passed, std::string note = {}) {
  return OracleCheck{std::move(name), passed, false, passed ? 0.0 : 1.0, 0.0, std::move(note)};
}

inline OracleCheck skipped(std::string name, std::string note) {
  return OracleCheck{std::move(name), true, true, 0.0, 0.0, std::move(note)};
}

}  // namespace detail

/// Runs the fast path and every oracle path and records each agreement.
/// Does not throw on disagreement; see require_agreement.
inline OracleReport cross_check(const Multigraph& g, const OracleConfig& cfg = {}) {
  require_connected(g, "cross_check");
  const TreeFamily family = tree_family(g, cfg.tree_cap);
  const ModulusResult fast = solve(g, cfg.solver);

  OracleReport r;
  r.tree_count = family.size();
  r.trees = family.trees;
  const ExactMeo meo = exact_meo(family);
  const ExactMod2 mod = exact_mod2(family);
  r.exact_meo = meo.value;
  r.exact_mod2 = mod.value;
  r.exact_eta = meo.eta;
  r.exact_rho = mod.rho;
  r.exact_mu = meo.mu;
  r.fast_meo = meo_value(fast);
  r.fast_eta = fast.eta_star;

  r.checks.push_back(detail::measured("fulkerson product", std::abs(mod.value * meo.value - 1.0), 1e-10));
  EdgeVector dual_eta(g.edge_count(), EdgeRole::Usage);
  for (EdgeId e = 0; e < g.edge_count(); ++e) dual_eta[e] = mod.rho[e] / mod.value;
  r.checks.push_back(detail::measured("eta primal vs dual", detail::max_abs_diff(meo.eta, dual_eta), 1e-8));
  r.checks.push_back(detail::measured("meo fast vs exact", std::abs(r.fast_meo - meo.value), 1e-6));
  r.checks.push_back(detail::measured("eta fast vs exact", detail::max_abs_diff(fast.eta_star, meo.eta), 1e-6));

  const FairSplit split = fair_trees(family, meo.eta);
  r.fair = split.fair;
  r.forbidden = split.forbidden;
  double slack = 0.0;
  for (std::size_t t : split.fair) slack = std::max(slack, std::abs(tree_cost(mod.rho, family.trees[t]) - 1.0));
  for (std::size_t t : split.forbidden) {
    if (std::abs(tree_cost(mod.rho, family.trees[t]) - 1.0) <= 1e-8) ++r.tight_forbidden;
  }
  r.checks.push_back(detail::measured("fair trees are tight", slack, 1e-8));
  {
    std::string outside;
    for (const auto& [tree, p] : fast.mu) {
      if (p <= 1e-6) continue;
      const auto idx = family.index_of(tree);
      if (!idx || !std::binary_search(split.fair.begin(), split.fair.end(), *idx)) {
        outside = "a fast-path support tree is forbidden";
        break;
      }
    }
    r.checks.push_back(detail::verdict("fast support is fair", outside.empty(), outside));
  }

  const double eta_max = meo.eta.max();
  if (g.vertex_count() <= cfg.vertex_cap) {
    r.min_partition = min_partition_exhaustive(g, cfg.vertex_cap);
    r.checks.push_back(
        detail::measured("min partition weight = 1/max eta", std::abs(r.min_partition->weight.value() * eta_max - 1.0), 1e-6));
    try {
      const FeasiblePartition from_eta = min_feasible_partition(g, fast);
      r.checks.push_back(detail::verdict("partition from eta* is minimum", from_eta.weight == r.min_partition->weight));
    } catch (const NumericalError& ex) {
      r.checks.push_back(detail::verdict("partition from eta* is minimum", false, ex.what()));
    }

    r.densest = densest_subgraph_exhaustive(g, cfg.vertex_cap);
    const Ratio kappa = nearest_ratio(fast.eta_star.min(), g.edge_count());
    const bool theta_ok = kappa.num > 0 && Ratio{kappa.den, kappa.num} == r.densest->theta;
    r.checks.push_back(detail::verdict("densest theta from kappa", theta_ok));
    try {
      bool listed = true;
      for (const auto& core : homogeneous_cores(g, fast)) {
        listed = listed && std::find(r.densest->vertex_sets.begin(), r.densest->vertex_sets.end(), core.vertices) !=
                               r.densest->vertex_sets.end();
      }
      r.checks.push_back(detail::verdict("cores are densest subgraphs", listed));
    } catch (const NumericalError& ex) {
      r.checks.push_back(detail::verdict("cores are densest subgraphs", false, ex.what()));
    }

    const PartitionHomogeneity by_partition = homogeneity_by_partitions(g, cfg.vertex_cap);
    r.checks.push_back(detail::verdict("homogeneity verdicts agree",
                                       by_partition.homogeneous == is_homogeneous(g, fast).homogeneous));
  } else {
    const std::string why = std::to_string(g.vertex_count()) + " vertices exceed the cap of " +
                            std::to_string(cfg.vertex_cap);
    for (const char* name : {"min partition weight = 1/max eta", "partition from eta* is minimum",
                             "densest theta from kappa", "cores are densest subgraphs", "homogeneity verdicts agree"}) {
      r.checks.push_back(detail::skipped(name, why));
    }
  }

  // Uniformity: Kirchhoff usage of the uniform law, counted from the family.
  EdgeVector uniform_usage(g.edge_count(), EdgeRole::Usage);
  for (const auto& tree : family.trees) {
    for (EdgeId e : tree) uniform_usage[e] += 1.0 / static_cast<double>(family.size());
  }
  const bool oracle_uniform = detail::max_abs_diff(uniform_usage, meo.eta) <= kHomogeneityTolerance;
  r.checks.push_back(detail::verdict("uniformity verdicts agree", oracle_uniform == is_uniform(g, fast)));
  return r;
}

inline void require_agreement(const OracleReport& report) {
  if (report.all_agree()) return;
  std::string msg = "oracle disagreement:";
  for (const auto& f : report.failures()) msg += " [" + f + "]";
  throw OracleDisagreement(msg);
}

}  // namespace stmod
