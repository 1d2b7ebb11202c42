#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stmod/modulus.hpp"
#include "stmod/multigraph.hpp"
#include "stmod/tree_oracle.hpp"
#include "stmod/types.hpp"

namespace stmod {

inline constexpr double kHomogeneityTolerance = 1e-6;

/// η(e) = P_μ(e ∈ γ).
inline EdgeVector edge_usage(const Multigraph& g, const TreePmf& mu) {
  EdgeVector eta(g.edge_count(), EdgeRole::Usage);
  for (const auto& [tree, p] : mu) {
    if (!is_spanning_tree(g, tree)) throw InputError("edge_usage: pmf support contains a non-spanning tree");
    for (EdgeId e : tree) eta[e] += p;
  }
  return eta;
}

/// E_μ|γ ∩ γ'| for independent γ, γ' ~ μ, computed as Σ_e η(e)².
inline double expected_overlap(const Multigraph& g, const TreePmf& mu) { return edge_usage(g, mu).squared_norm(); }

struct UsageStats {
  double mean = 0.0;
  double variance = 0.0;
  double energy = 0.0;
};

/// Mean, variance and energy Σ η² of a usage vector. The energy satisfies
/// E₂(η) = |E|·Var(η) + (|V|-1)²/|E| for any η that comes from a pmf;
/// the identity is checked here.
inline UsageStats usage_stats(const Multigraph& g, const EdgeVector& eta) {
  const std::size_t m = g.edge_count();
  if (eta.size() != m || m == 0) throw InputError("usage_stats: usage vector does not match graph");
  UsageStats s;
  s.mean = eta.sum() / static_cast<double>(m);
  double second = 0.0;
  for (double v : eta) second += (v - s.mean) * (v - s.mean);
  s.variance = second / static_cast<double>(m);
  s.energy = eta.squared_norm();
  const double n1 = static_cast<double>(g.vertex_count() - 1);
  const double expected_mean = n1 / static_cast<double>(m);
  if (std::abs(s.mean - expected_mean) > 1e-8) {
    throw NumericalError("usage_stats: mean usage " + std::to_string(s.mean) + " is not (|V|-1)/|E|");
  }
  const double identity = static_cast<double>(m) * s.variance + n1 * n1 / static_cast<double>(m);
  if (std::abs(identity - s.energy) > 1e-8 * std::max(1.0, s.energy)) {
    throw NumericalError("usage_stats: energy-variance identity violated");
  }
  return s;
}

inline double homogeneous_lower_bound(const Multigraph& g) {
  if (g.edge_count() == 0) throw InputError("homogeneous_lower_bound: graph has no edges");
  const double n1 = static_cast<double>(g.vertex_count() - 1);
  return n1 * n1 / static_cast<double>(g.edge_count());
}

struct HomogeneityCertificate {
  bool homogeneous = false;
  /// Which equivalent condition was evaluated.
  std::string condition;
  /// max_e |η*(e) - (|V|-1)/|E||.
  double residual = 0.0;
  double eta_hom = 0.0;
};

/// Homogeneity test: η* is constant, equal to (|V|-1)/|E|.
inline HomogeneityCertificate is_homogeneous(const Multigraph& g, const ModulusResult& result,
                                             double tol = kHomogeneityTolerance) {
  HomogeneityCertificate cert;
  cert.condition = "eta* constant at (|V|-1)/|E|";
  cert.eta_hom = static_cast<double>(g.vertex_count() - 1) / static_cast<double>(g.edge_count());
  for (double v : result.eta_star) cert.residual = std::max(cert.residual, std::abs(v - cert.eta_hom));
  cert.homogeneous = cert.residual <= tol;
  return cert;
}

/// Uniformity test: the uniform tree law is optimal iff the effective
/// resistances (its edge usage) coincide with η*.
inline bool is_uniform(const Multigraph& g, const ModulusResult& result, double tol = kHomogeneityTolerance) {
  const EdgeVector reff = effective_resistance(g);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (std::abs(reff[e] - result.eta_star[e]) > tol) return false;
  }
  return true;
}

/// Necessary condition for γ to be fair: it is ρ*-minimal, ℓ_ρ*(γ) = 1.
inline bool fair_tree_candidate(const ModulusResult& result, const SpanningTree& tree, double tol = 1e-8) {
  return std::abs(tree_cost(result.rho_star, tree) - 1.0) <= tol;
}

/// Inverse-CDF draw from μ with a 64-bit Mersenne twister; the stream
/// depends only on the seed, not on the standard library.
class TreeSampler {
 public:
  TreeSampler(const TreePmf& mu, std::uint64_t seed) : mu_(mu), engine_(seed) {
    if (mu.empty()) throw InputError("sample_tree: empty pmf");
    double acc = 0.0;
    for (const auto& entry : mu) {
      acc += entry.probability;
      cumulative_.push_back(acc);
    }
  }

  const SpanningTree& next() {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53 * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return mu_.entries()[static_cast<std::size_t>(it - cumulative_.begin())].tree;
  }

 private:
  const TreePmf& mu_;
  std::mt19937_64 engine_;
  std::vector<double> cumulative_;
};

inline SpanningTree sample_tree(const TreePmf& mu, std::uint64_t seed) { return TreeSampler(mu, seed).next(); }

inline std::vector<SpanningTree> sample_trees(const TreePmf& mu, std::uint64_t seed, std::size_t count) {
  TreeSampler sampler(mu, seed);
  std::vector<SpanningTree> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.next());
  return out;
}

}  // namespace stmod
