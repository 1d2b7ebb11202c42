#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "stmod/types.hpp"

namespace stmod {

/// Dual active-set solver (Goldfarb-Idnani) for
///
///     minimize  ½‖x‖²   subject to   Σ_{e∈row_i} x_e ≥ 1   for every row i,
///
/// where each row is a 0/1 edge-indicator vector given by its support.
/// The iterate is always optimal for the constraints in the active set,
/// so rows can be appended between calls to `solve()` and the method
/// resumes from the previous optimum.
///
/// The active set is represented by a Cholesky factor of its Gram matrix
/// (pairwise row overlaps). Additions append a row to the factor; drops
/// apply a rank-one update to the trailing block. If an update loses
/// positive definiteness the factor is rebuilt from scratch; a failure of
/// the rebuild is reported as NumericalError.
class DualActiveSetQp {
 public:
  explicit DualActiveSetQp(std::size_t dimension, double tolerance = 1e-12)
      : dim_(dimension), tol_(tolerance), x_(dimension, 0.0) {}

  /// Appends a constraint row; returns its index.
  std::size_t add_row(std::span<const EdgeId> support) {
    std::vector<EdgeId> row(support.begin(), support.end());
    std::sort(row.begin(), row.end());
    for (EdgeId e : row) {
      if (e >= dim_) throw InputError("dual qp: row index out of range");
    }
    if (row.empty()) throw InputError("dual qp: empty constraint row");
    rows_.push_back(std::move(row));
    u_.push_back(0.0);
    active_pos_.push_back(kInactive);
    return rows_.size() - 1;
  }

  /// Runs the dual method until every row satisfies a·x ≥ 1 - tolerance.
  void solve() {
    const std::size_t step_limit = 50 * (rows_.size() + dim_) + 100;
    std::size_t steps = 0;
    while (true) {
      std::size_t p = most_violated();
      if (p == kInactive) break;
      add_violated(p, steps, step_limit);
    }
    polish();
  }

  std::span<const double> solution() const noexcept { return x_; }
  double objective() const {
    double s = 0.0;
    for (double v : x_) s += v * v;
    return 0.5 * s;
  }
  /// Multiplier of row i for the ½‖x‖² objective (zero when inactive).
  double multiplier(std::size_t i) const { return u_.at(i); }
  std::span<const double> multipliers() const noexcept { return u_; }
  std::size_t row_count() const noexcept { return rows_.size(); }
  std::span<const EdgeId> row(std::size_t i) const { return rows_.at(i); }
  std::size_t active_count() const noexcept { return active_.size(); }
  bool is_active(std::size_t i) const { return active_pos_.at(i) != kInactive; }
  std::size_t refactorizations() const noexcept { return refactorizations_; }

  double row_value(std::size_t i) const {
    double s = 0.0;
    for (EdgeId e : rows_[i]) s += x_[e];
    return s;
  }

 private:
  static constexpr std::size_t kInactive = std::numeric_limits<std::size_t>::max();

  std::size_t most_violated() const {
    std::size_t best = kInactive;
    double worst = -tol_;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (active_pos_[i] != kInactive) continue;
      double s = row_value(i) - 1.0;
      if (s < worst) {
        worst = s;
        best = i;
      }
    }
    return best;
  }

  double overlap(std::size_t a, std::size_t b) const {
    const auto& ra = rows_[a];
    const auto& rb = rows_[b];
    std::size_t i = 0, j = 0, count = 0;
    while (i < ra.size() && j < rb.size()) {
      if (ra[i] < rb[j]) {
        ++i;
      } else if (rb[j] < ra[i]) {
        ++j;
      } else {
        ++count;
        ++i;
        ++j;
      }
    }
    return static_cast<double>(count);
  }

  // Solves L y = b in place (forward substitution).
  void forward(std::vector<double>& b) const {
    for (std::size_t i = 0; i < b.size(); ++i) {
      double s = b[i];
      for (std::size_t j = 0; j < i; ++j) s -= chol_[i][j] * b[j];
      b[i] = s / chol_[i][i];
    }
  }

  // Solves Lᵀ y = b in place (back substitution).
  void backward(std::vector<double>& b) const {
    for (std::size_t i = b.size(); i-- > 0;) {
      double s = b[i];
      for (std::size_t j = i + 1; j < b.size(); ++j) s -= chol_[j][i] * b[j];
      b[i] = s / chol_[i][i];
    }
  }

  void add_violated(std::size_t p, std::size_t& steps, std::size_t step_limit) {
    const auto& np = rows_[p];
    const double np_norm2 = static_cast<double>(np.size());
    u_[p] = 0.0;
    while (true) {
      if (++steps > step_limit) throw NumericalError("dual qp: step limit reached without convergence");
      const std::size_t q = active_.size();
      std::vector<double> v(q);
      for (std::size_t j = 0; j < q; ++j) v[j] = overlap(active_[j], p);
      std::vector<double> l = v;
      forward(l);
      std::vector<double> r = l;
      backward(r);

      // z = n_p - A_activeᵀ r
      std::vector<double> z(dim_, 0.0);
      for (EdgeId e : np) z[e] = 1.0;
      for (std::size_t j = 0; j < q; ++j) {
        if (r[j] == 0.0) continue;
        for (EdgeId e : rows_[active_[j]]) z[e] -= r[j];
      }
      double z_norm2 = 0.0;
      for (double val : z) z_norm2 += val * val;
      const bool null_step = z_norm2 <= 1e-14 * np_norm2;

      std::size_t drop = kInactive;
      double t_partial = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < q; ++j) {
        if (r[j] > 1e-14) {
          double ratio = u_[active_[j]] / r[j];
          if (ratio < t_partial) {
            t_partial = ratio;
            drop = j;
          }
        }
      }

      const double slack = row_value(p) - 1.0;
      if (null_step) {
        if (drop == kInactive) throw NumericalError("dual qp: constraints are infeasible");
        for (std::size_t j = 0; j < q; ++j) u_[active_[j]] -= t_partial * r[j];
        u_[p] += t_partial;
        remove_active(drop);
        continue;
      }

      const double t_full = -slack / z_norm2;
      const double t = std::min(t_partial, t_full);
      for (std::size_t e = 0; e < dim_; ++e) x_[e] += t * z[e];
      for (std::size_t j = 0; j < q; ++j) u_[active_[j]] -= t * r[j];
      u_[p] += t;

      if (t_full <= t_partial) {
        append_active(p, l, z_norm2);
        return;
      }
      remove_active(drop);
    }
  }

  // The new diagonal entry of the factor is ‖z‖, the norm of the part of
  // n_p orthogonal to the active rows.
  void append_active(std::size_t p, const std::vector<double>& l, double z_norm2) {
    active_pos_[p] = active_.size();
    active_.push_back(p);
    std::vector<double> row = l;
    row.push_back(std::sqrt(z_norm2));
    chol_.push_back(std::move(row));
  }

  void remove_active(std::size_t k) {
    const std::size_t q = active_.size();
    const std::size_t row_id = active_[k];
    u_[row_id] = 0.0;
    active_pos_[row_id] = kInactive;
    active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t j = k; j < active_.size(); ++j) active_pos_[active_[j]] = j;

    // Drop row/column k of L Lᵀ: the trailing block absorbs the removed
    // column as a rank-one update.
    std::vector<double> w;
    for (std::size_t i = k + 1; i < q; ++i) w.push_back(chol_[i][k]);
    chol_.erase(chol_.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t i = k; i < chol_.size(); ++i) chol_[i].erase(chol_[i].begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t i = 0; i < w.size(); ++i) {
      const std::size_t ii = k + i;
      double& diag = chol_[ii][ii];
      const double rr = std::hypot(diag, w[i]);
      const double c = rr / diag;
      const double s = w[i] / diag;
      diag = rr;
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        double& lji = chol_[k + j][ii];
        lji = (lji + s * w[j]) / c;
        w[j] = c * w[j] - s * lji;
      }
      if (!(rr > 0.0) || !std::isfinite(rr)) {
        refactor();
        return;
      }
    }
  }

  void refactor() {
    ++refactorizations_;
    const std::size_t q = active_.size();
    chol_.assign(q, {});
    for (std::size_t i = 0; i < q; ++i) {
      chol_[i].assign(i + 1, 0.0);
      for (std::size_t j = 0; j <= i; ++j) {
        double s = overlap(active_[i], active_[j]);
        for (std::size_t k = 0; k < j; ++k) s -= chol_[i][k] * chol_[j][k];
        if (i == j) {
          if (s <= 1e-12 * static_cast<double>(rows_[active_[i]].size())) {
            throw NumericalError("dual qp: active constraints are linearly dependent");
          }
          chol_[i][i] = std::sqrt(s);
        } else {
          chol_[i][j] = s / chol_[j][j];
        }
      }
    }
  }

  // Projects onto the active face exactly: multipliers solve G u = 1 and
  // x = Aᵀu. Kept only if it preserves dual and primal feasibility.
  void polish() {
    const std::size_t q = active_.size();
    if (q == 0) return;
    std::vector<double> u(q, 1.0);
    forward(u);
    backward(u);
    for (double val : u) {
      if (!(val >= 0.0)) return;
    }
    std::vector<double> x(dim_, 0.0);
    for (std::size_t j = 0; j < q; ++j) {
      for (EdgeId e : rows_[active_[j]]) x[e] += u[j];
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      double s = 0.0;
      for (EdgeId e : rows_[i]) s += x[e];
      if (s < 1.0 - tol_) return;
    }
    x_ = std::move(x);
    for (std::size_t j = 0; j < q; ++j) u_[active_[j]] = u[j];
  }

  std::size_t dim_;
  double tol_;
  std::vector<double> x_;
  std::vector<std::vector<EdgeId>> rows_;
  std::vector<double> u_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> active_pos_;
  std::vector<std::vector<double>> chol_;  // row i holds L[i][0..i]
  std::size_t refactorizations_ = 0;
};

}  // namespace stmod
