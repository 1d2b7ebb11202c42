#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "stmod/dual_qp.hpp"
#include "stmod/multigraph.hpp"
#include "stmod/tree_oracle.hpp"
#include "stmod/types.hpp"

namespace stmod {

struct SolverConfig {
  /// Stop once the lightest spanning tree has ρ-length ≥ 1 - tolerance.
  double tolerance = 1e-8;
  /// Outer-iteration cap; 10·|E| when unset.
  std::optional<std::size_t> max_iterations;
  /// Feasibility tolerance of the quadratic subproblem.
  double subproblem_tolerance = 1e-12;

  void validate() const {
    if (!(tolerance >= 0.0)) throw InputError("solver config: tolerance must be nonnegative");
    if (max_iterations && *max_iterations < 1) throw InputError("solver config: max_iterations must be >= 1");
    if (!(subproblem_tolerance > 0.0)) throw InputError("solver config: subproblem tolerance must be positive");
  }
};

/// Outcome of the spanning-tree 2-modulus computation.
///
/// `lambda` holds the Lagrange multipliers of the Σρ² formulation for
/// every tree in `active_trees` (zero for trees whose constraint is
/// slack); `mu` is the normalized positive part of `lambda`.
struct ModulusResult {
  EdgeVector rho_star;
  double mod2 = 0.0;
  EdgeVector eta_star;
  std::vector<SpanningTree> active_trees;
  std::vector<double> lambda;
  TreePmf mu;
  std::size_t iterations = 0;
  /// ρ*-length of the lightest spanning tree, minus one.
  double worst_violation = 0.0;
  /// Subproblem modulus after each outer iteration (nondecreasing).
  std::vector<double> mod2_history;
  SolverConfig config;
};

/// Minimum expected overlap, the reciprocal of the modulus.
inline double meo_value(const ModulusResult& result) {
  if (!(result.mod2 > 0.0)) throw InputError("meo_value: modulus must be positive");
  return 1.0 / result.mod2;
}

struct QpSolution {
  EdgeVector rho;
  std::vector<double> lambda;
};

/// Solves min Σρ² subject to ℓ_ρ(γ) ≥ 1 for the given trees, one shot.
/// λ are the multipliers of that formulation (2ρ = Nᵀλ).
inline QpSolution qp_subproblem(std::span<const SpanningTree> rows, std::size_t edge_count,
                                double tolerance = 1e-12) {
  if (rows.empty()) throw InputError("qp_subproblem: no constraint rows");
  DualActiveSetQp qp(edge_count, tolerance);
  for (const auto& t : rows) qp.add_row(t.edges());
  qp.solve();
  QpSolution out{EdgeVector(std::vector<double>(qp.solution().begin(), qp.solution().end()), EdgeRole::Density), {}};
  for (double u : qp.multipliers()) out.lambda.push_back(2.0 * u);
  return out;
}

/// Normalizes the multipliers into an optimal pmf and checks that it
/// reproduces η*: Σλ = 2·Mod₂ and Nᵀμ = η* (tolerance 1e-8).
/// Multipliers below 1e-12·max λ are treated as zero.
inline TreePmf extract_pmf(std::span<const double> lambda, double mod2, std::span<const SpanningTree> trees,
                           const EdgeVector& eta_star, double tolerance = 1e-8) {
  if (lambda.size() != trees.size()) throw InputError("extract_pmf: multiplier count mismatch");
  double lmax = 0.0;
  for (double l : lambda) {
    if (l < -tolerance) throw InputError("extract_pmf: negative multiplier");
    lmax = std::max(lmax, l);
  }
  if (!(lmax > 0.0)) throw InputError("extract_pmf: all multipliers are zero");
  std::vector<SpanningTree> support;
  std::vector<double> weights;
  double total = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] > 1e-12 * lmax) {
      support.push_back(trees[i]);
      weights.push_back(lambda[i]);
      total += lambda[i];
    }
  }
  if (std::abs(total - 2.0 * mod2) > tolerance * std::max(1.0, 2.0 * mod2)) {
    throw NumericalError("extract_pmf: multipliers sum to " + std::to_string(total) + ", expected 2*mod2 = " +
                         std::to_string(2.0 * mod2));
  }
  TreePmf mu = TreePmf::normalized(std::move(support), weights);
  std::vector<double> usage(eta_star.size(), 0.0);
  for (const auto& [tree, p] : mu) {
    for (EdgeId e : tree) {
      if (e >= usage.size()) throw InputError("extract_pmf: tree edge out of range");
      usage[e] += p;
    }
  }
  for (std::size_t e = 0; e < usage.size(); ++e) {
    if (std::abs(usage[e] - eta_star[e]) > tolerance) {
      throw NumericalError("extract_pmf: edge usage of extracted pmf deviates from eta* on edge " +
                           std::to_string(e));
    }
  }
  return mu;
}

/// Spanning-tree 2-modulus by constraint generation.
///
/// Starting from ρ ≡ 0 and an empty tree family, each pass asks Kruskal
/// for the ρ-lightest spanning tree. If its length is below 1 - tolerance
/// it is added to the family and the quadratic subproblem is re-solved
/// from the previous optimum; otherwise ρ is admissible for every tree
/// and the loop stops.
inline ModulusResult solve(const Multigraph& g, const SolverConfig& cfg = {}) {
  cfg.validate();
  if (g.edge_count() == 0) throw InputError("solve: graph has no edges");
  require_connected(g, "solve");
  const std::size_t m = g.edge_count();
  const std::size_t cap = cfg.max_iterations.value_or(10 * m);

  ModulusResult result;
  result.config = cfg;
  DualActiveSetQp qp(m, cfg.subproblem_tolerance);
  std::unordered_set<SpanningTree, SpanningTreeHash> seen;
  std::vector<double> rho(m, 0.0);
  double violation = -1.0;

  while (true) {
    SpanningTree lightest = min_tree(g, rho);
    const double length = [&] {
      double s = 0.0;
      for (EdgeId e : lightest) s += rho[e];
      return s;
    }();
    violation = length - 1.0;
    if (length >= 1.0 - cfg.tolerance) break;
    if (seen.count(lightest)) break;  // already constrained; only round-off remains
    if (result.iterations >= cap) {
      throw ConvergenceError("solve: iteration cap " + std::to_string(cap) + " reached with violation " +
                                 std::to_string(-violation),
                             -violation, result.iterations);
    }
    seen.insert(lightest);
    result.active_trees.push_back(lightest);
    qp.add_row(lightest.edges());
    qp.solve();
    rho.assign(qp.solution().begin(), qp.solution().end());
    result.mod2_history.push_back(2.0 * qp.objective());
    ++result.iterations;
  }

  result.worst_violation = violation;
  result.rho_star = EdgeVector(rho, EdgeRole::Density);
  result.mod2 = 2.0 * qp.objective();
  result.eta_star = EdgeVector(m, EdgeRole::Usage);
  for (EdgeId e = 0; e < m; ++e) result.eta_star[e] = rho[e] / result.mod2;
  for (double u : qp.multipliers()) result.lambda.push_back(2.0 * u);
  result.mu = extract_pmf(result.lambda, result.mod2, result.active_trees, result.eta_star);
  return result;
}

/// Largest violation of each optimality condition.
struct KktReport {
  /// max(0, 1 - ℓ_ρ(lightest tree)), from a fresh Kruskal call.
  double admissibility = 0.0;
  /// max_e |η(e) - ρ(e)/Mod₂|.
  double eta_relation = 0.0;
  /// max over μ(γ) > 0 of |ℓ_ρ(γ) - 1|.
  double complementary_slackness = 0.0;
  /// |Σμ - 1|.
  double pmf_sum = 0.0;
  /// max_e |(Nᵀμ)(e) - η(e)|.
  double usage_mismatch = 0.0;

  double worst() const {
    return std::max({admissibility, eta_relation, complementary_slackness, pmf_sum, usage_mismatch});
  }
};

inline KktReport kkt_residuals(const Multigraph& g, const ModulusResult& result) {
  const std::size_t m = g.edge_count();
  if (result.rho_star.size() != m || result.eta_star.size() != m) {
    throw InputError("kkt_residuals: result does not match graph");
  }
  KktReport report;
  const SpanningTree lightest = min_tree(g, result.rho_star);
  report.admissibility = std::max(0.0, 1.0 - tree_cost(result.rho_star, lightest));
  for (EdgeId e = 0; e < m; ++e) {
    const double predicted = result.mod2 > 0.0 ? result.rho_star[e] / result.mod2 : 0.0;
    report.eta_relation = std::max(report.eta_relation, std::abs(result.eta_star[e] - predicted));
  }
  std::vector<double> usage(m, 0.0);
  for (const auto& [tree, p] : result.mu) {
    report.complementary_slackness =
        std::max(report.complementary_slackness, std::abs(tree_cost(result.rho_star, tree) - 1.0));
    for (EdgeId e : tree) usage[e] += p;
  }
  report.pmf_sum = result.mu.empty() ? 1.0 : std::abs(result.mu.total() - 1.0);
  for (EdgeId e = 0; e < m; ++e) {
    report.usage_mismatch = std::max(report.usage_mismatch, std::abs(usage[e] - result.eta_star[e]));
  }
  return report;
}

}  // namespace stmod
