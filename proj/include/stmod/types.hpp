#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stmod {

using VertexId = std::size_t;
using EdgeId = std::size_t;

inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported input (bad edge list, disconnected graph, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive routine was asked to work beyond its configured cap.
class CapExceeded : public InputError {
 public:
  CapExceeded(const std::string& what, std::size_t actual, std::size_t cap)
      : InputError(what + " (" + std::to_string(actual) + " > cap " + std::to_string(cap) + ")"),
        actual_(actual),
        cap_(cap) {}
  std::size_t actual() const noexcept { return actual_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t actual_;
  std::size_t cap_;
};

/// A floating-point invariant failed beyond its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The constraint-generation loop hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double violation, std::size_t iterations)
      : Error(what), violation_(violation), iterations_(iterations) {}
  double violation() const noexcept { return violation_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double violation_;
  std::size_t iterations_;
};

enum class EdgeRole { Generic, Density, Usage, Resistance };

/// A real value per edge, indexed by edge id.
class EdgeVector {
 public:
  EdgeVector() = default;
  EdgeVector(std::size_t edges, EdgeRole role, double fill = 0.0) : role_(role), values_(edges, fill) {}
  EdgeVector(std::vector<double> values, EdgeRole role) : role_(role), values_(std::move(values)) {}

  EdgeRole role() const noexcept { return role_; }
  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](EdgeId e) { return values_[e]; }
  double operator[](EdgeId e) const { return values_[e]; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }
  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }

  double sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }
  double max() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }
  double min() const { return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end()); }
  double squared_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s;
  }

 private:
  EdgeRole role_ = EdgeRole::Generic;
  std::vector<double> values_;
};

/// Edge set of a spanning tree, kept sorted and duplicate-free.
class SpanningTree {
 public:
  SpanningTree() = default;
  explicit SpanningTree(std::vector<EdgeId> edges) : edges_(std::move(edges)) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  }

  std::size_t size() const noexcept { return edges_.size(); }
  bool contains(EdgeId e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }
  std::span<const EdgeId> edges() const noexcept { return edges_; }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }

  friend auto operator<=>(const SpanningTree&, const SpanningTree&) = default;
  friend bool operator==(const SpanningTree&, const SpanningTree&) = default;

 private:
  std::vector<EdgeId> edges_;
};

struct SpanningTreeHash {
  std::size_t operator()(const SpanningTree& t) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (EdgeId e : t) {
      h ^= e + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// Sparse probability mass function over spanning trees.
///
/// Entries are kept sorted by tree so iteration order is deterministic.
/// Duplicate trees are merged; zero-mass entries are dropped.
class TreePmf {
 public:
  struct Entry {
    SpanningTree tree;
    double probability;
  };

  TreePmf() = default;

  explicit TreePmf(std::vector<Entry> entries, double sum_tolerance = 1e-12) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.tree < b.tree; });
    for (auto& entry : entries) {
      if (!(entry.probability >= 0.0) || !std::isfinite(entry.probability)) {
        throw InputError("tree pmf: negative or non-finite probability");
      }
      if (entry.probability == 0.0) continue;
      if (!entries_.empty() && entries_.back().tree == entry.tree) {
        entries_.back().probability += entry.probability;
      } else {
        entries_.push_back(std::move(entry));
      }
    }
    if (entries_.empty()) throw InputError("tree pmf: empty support");
    double total = 0.0;
    for (const auto& entry : entries_) total += entry.probability;
    if (std::abs(total - 1.0) > sum_tolerance) {
      throw InputError("tree pmf: probabilities sum to " + std::to_string(total));
    }
  }

  /// Builds a pmf from nonnegative weights by normalizing them.
  static TreePmf normalized(std::vector<SpanningTree> trees, std::span<const double> weights) {
    if (trees.size() != weights.size()) throw InputError("tree pmf: weight count mismatch");
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw InputError("tree pmf: weights sum to zero");
    std::vector<Entry> entries;
    entries.reserve(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) {
      entries.push_back({std::move(trees[i]), weights[i] / total});
    }
    return TreePmf(std::move(entries), 1e-9);
  }

  static TreePmf point_mass(SpanningTree tree) { return TreePmf({{std::move(tree), 1.0}}); }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  std::span<const Entry> entries() const noexcept { return entries_; }

  double probability(const SpanningTree& tree) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), tree,
                               [](const Entry& a, const SpanningTree& t) { return a.tree < t; });
    return (it != entries_.end() && it->tree == tree) ? it->probability : 0.0;
  }

  double total() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.probability;
    return s;
  }

 private:
  std::vector<Entry> entries_;
};

/// A nonnegative rational p/q, used where exact comparison matters
/// (denseness, partition weights).
struct Ratio {
  std::size_t num = 0;
  std::size_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio& a, const Ratio& b) { return a.num * b.den == b.num * a.den; }
  friend bool operator<(const Ratio& a, const Ratio& b) { return a.num * b.den < b.num * a.den; }
  friend bool operator>(const Ratio& a, const Ratio& b) { return b < a; }
  friend bool operator<=(const Ratio& a, const Ratio& b) { return !(b < a); }
  friend bool operator>=(const Ratio& a, const Ratio& b) { return !(a < b); }
};

/// Best rational approximation of x with denominator at most max_den
/// (continued-fraction convergents and semiconvergents).
inline Ratio nearest_ratio(double x, std::size_t max_den) {
  if (!(x >= 0.0)) throw InputError("nearest_ratio: negative value");
  long double p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  long double v = x;
  Ratio best{static_cast<std::size_t>(std::llround(x)), 1};
  for (int iter = 0; iter < 64; ++iter) {
    long double a = std::floor(v);
    long double p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > static_cast<long double>(max_den)) {
      long double k = std::floor((static_cast<long double>(max_den) - q0) / q1);
      long double ps = k * p1 + p0, qs = k * q1 + q0;
      Ratio semi{static_cast<std::size_t>(ps), static_cast<std::size_t>(qs)};
      Ratio conv{static_cast<std::size_t>(p1), static_cast<std::size_t>(q1)};
      return std::abs(semi.value() - x) < std::abs(conv.value() - x) ? semi : conv;
    }
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    best = {static_cast<std::size_t>(p1), static_cast<std::size_t>(q1)};
    long double frac = v - a;
    if (frac < 1e-15L) break;
    v = 1.0L / frac;
  }
  return best;
}

}  // namespace stmod
