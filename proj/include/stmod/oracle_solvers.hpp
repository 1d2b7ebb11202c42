#pragma once

// Dense solvers used only by the brute-force oracle. They are deliberately
// unrelated to the fast path (no Kruskal, no dual active-set updates).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stmod/types.hpp"

namespace stmod::oracle {

struct MinNormPoint {
  Eigen::VectorXd point;
  std::vector<std::pair<std::size_t, double>> weights;  // (row, convex weight)
  std::size_t major_iterations = 0;
};

/// Wolfe's minimum-norm-point algorithm: the point of least Euclidean norm
/// in the convex hull of the rows of `points`, with its convex weights.
inline MinNormPoint min_norm_point(const Eigen::MatrixXd& points, double tol = 1e-13) {
  const Eigen::Index count = points.rows();
  if (count == 0) throw InputError("min_norm_point: no points");
  const double scale = points.rowwise().squaredNorm().maxCoeff();

  Eigen::Index start = 0;
  points.rowwise().squaredNorm().minCoeff(&start);
  std::vector<Eigen::Index> corral{start};
  std::vector<double> w{1.0};
  Eigen::VectorXd x = points.row(start).transpose();

  auto combine = [&] {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(points.cols());
    for (std::size_t i = 0; i < corral.size(); ++i) y += w[i] * points.row(corral[i]).transpose();
    return y;
  };

  MinNormPoint out;
  const std::size_t major_cap = 100 * static_cast<std::size_t>(count) + 1000;
  for (; out.major_iterations < major_cap; ++out.major_iterations) {
    Eigen::Index j = 0;
    const Eigen::VectorXd proj = points * x;
    proj.minCoeff(&j);
    if (x.squaredNorm() - proj(j) <= tol * scale) break;
    if (std::find(corral.begin(), corral.end(), j) != corral.end()) break;
    corral.push_back(j);
    w.push_back(0.0);

    for (std::size_t minor = 0; minor < 10 * corral.size() + 10; ++minor) {
      const auto k = static_cast<Eigen::Index>(corral.size());
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) kkt(a, b) = points.row(corral[a]).dot(points.row(corral[b]));
        kkt(a, k) = kkt(k, a) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
      rhs(k) = 1.0;
      const Eigen::VectorXd alpha = kkt.colPivHouseholderQr().solve(rhs);

      bool interior = true;
      for (Eigen::Index a = 0; a < k; ++a) interior = interior && alpha(a) > 1e-14;
      if (interior) {
        for (Eigen::Index a = 0; a < k; ++a) w[a] = alpha(a);
        break;
      }
      double theta = 1.0;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (alpha(a) <= 1e-14 && w[a] - alpha(a) > 0.0) theta = std::min(theta, w[a] / (w[a] - alpha(a)));
      }
      for (Eigen::Index a = 0; a < k; ++a) w[a] = theta * alpha(a) + (1.0 - theta) * w[a];
      std::vector<Eigen::Index> kept;
      std::vector<double> kept_w;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (w[a] > 1e-14) {
          kept.push_back(corral[a]);
          kept_w.push_back(w[a]);
        }
      }
      corral = std::move(kept);
      w = std::move(kept_w);
    }
    double total = 0.0;
    for (double v : w) total += v;
    for (double& v : w) v /= total;
    x = combine();
  }
  out.point = x;
  for (std::size_t i = 0; i < corral.size(); ++i) out.weights.emplace_back(static_cast<std::size_t>(corral[i]), w[i]);
  return out;
}

/// Lawson-Hanson nonnegative least squares: argmin ‖E u - f‖ over u ≥ 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& e, const Eigen::VectorXd& f, double tol = 1e-13) {
  const Eigen::Index n = e.cols();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double scale = std::max(1.0, e.cwiseAbs().maxCoeff() * std::max(1.0, f.norm()));

  for (std::size_t outer = 0; outer < 3 * static_cast<std::size_t>(n) + 10; ++outer) {
    const Eigen::VectorXd grad = e.transpose() * (f - e * u);
    Eigen::Index t = -1;
    double best = tol * scale;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && grad(j) > best) {
        best = grad(j);
        t = j;
      }
    }
    if (t < 0) break;
    passive[t] = true;

    while (true) {
      std::vector<Eigen::Index> cols;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j]) cols.push_back(j);
      }
      Eigen::MatrixXd sub(e.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = e.col(cols[c]);
      const Eigen::VectorXd zp = sub.colPivHouseholderQr().solve(f);
      bool positive = true;
      for (Eigen::Index c = 0; c < zp.size(); ++c) positive = positive && zp(c) > 0.0;
      if (positive) {
        u.setZero();
        for (std::size_t c = 0; c < cols.size(); ++c) u(cols[c]) = zp(static_cast<Eigen::Index>(c));
        break;
      }
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const double z = zp(static_cast<Eigen::Index>(c));
        if (z <= 0.0) alpha = std::min(alpha, u(cols[c]) / (u(cols[c]) - z));
      }
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const double z = zp(static_cast<Eigen::Index>(c));
        u(cols[c]) += alpha * (z - u(cols[c]));
        if (u(cols[c]) <= 1e-15) {
          u(cols[c]) = 0.0;
          passive[cols[c]] = false;
        }
      }
    }
  }
  return u;
}

/// Least-distance programming: argmin ‖x‖ subject to G x ≥ h, solved through
/// the NNLS dual (Lawson and Hanson, chapter 23).
inline Eigen::VectorXd least_distance(const Eigen::MatrixXd& g, const Eigen::VectorXd& h) {
  const Eigen::Index n = g.cols();
  Eigen::MatrixXd e(n + 1, g.rows());
  e.topRows(n) = g.transpose();
  e.row(n) = h.transpose();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n + 1);
  f(n) = 1.0;
  const Eigen::VectorXd u = nnls(e, f);
  const Eigen::VectorXd r = e * u - f;
  if (r.norm() < 1e-12) throw NumericalError("least_distance: constraints are infeasible");
  return -r.head(n) / r(n);
}

struct LpSolution {
  bool feasible = false;
  double objective = 0.0;
  Eigen::VectorXd x;
};

/// Dense tableau simplex over the fixed polyhedron {x ≥ 0 : A x = b}.
/// Phase one runs once in the constructor (artificial sum below
/// `feas_tol` counts as feasible, redundant rows are dropped); each
/// maximize() call then starts from the previous optimal basis.
/// Dantzig pricing, switching to Bland's rule while pivots stay degenerate.
class EqualityLp {
 public:
  EqualityLp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double feas_tol = 1e-9, double pivot_tol = 1e-11)
      : rows_(a.rows()), cols_(a.cols()), width_(a.cols() + a.rows() + 1), pivot_tol_(pivot_tol) {
    t_ = Eigen::MatrixXd::Zero(rows_ + 1, width_);
    t_.topLeftCorner(rows_, cols_) = a;
    t_.block(0, cols_, rows_, rows_).setIdentity();
    t_.col(width_ - 1).head(rows_) = b;
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (b(i) < 0.0) {
        t_.row(i).head(cols_) *= -1.0;
        t_(i, width_ - 1) *= -1.0;
      }
    }
    basis_.resize(static_cast<std::size_t>(rows_));
    for (Eigen::Index i = 0; i < rows_; ++i) basis_[i] = cols_ + i;
    alive_.assign(static_cast<std::size_t>(rows_), true);

    // Phase one: maximize -Σ artificials.
    for (Eigen::Index i = 0; i < rows_; ++i) t_.row(rows_) -= t_.row(i);
    for (Eigen::Index i = 0; i < rows_; ++i) t_(rows_, cols_ + i) = 0.0;
    iterate();
    const double rhs_norm = t_.col(width_ - 1).head(rows_).cwiseAbs().sum();
    feasible_ = -t_(rows_, width_ - 1) <= feas_tol * std::max(1.0, rhs_norm);
    if (!feasible_) return;

    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (basis_[i] < cols_) continue;
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < cols_; ++j) {
        if (std::abs(t_(i, j)) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        alive_[i] = false;
      }
    }
  }

  bool feasible() const noexcept { return feasible_; }

  LpSolution maximize(const Eigen::VectorXd& c) {
    LpSolution out;
    if (!feasible_) return out;
    t_.row(rows_).setZero();
    for (Eigen::Index j = 0; j < cols_; ++j) t_(rows_, j) = -c(j);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (alive_[i] && basis_[i] < cols_ && c(basis_[i]) != 0.0) t_.row(rows_) += c(basis_[i]) * t_.row(i);
    }
    iterate();
    out.feasible = true;
    out.x = Eigen::VectorXd::Zero(cols_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      if (alive_[i] && basis_[i] < cols_) out.x(basis_[i]) = std::max(0.0, t_(i, width_ - 1));
    }
    out.objective = c.dot(out.x);
    return out;
  }

 private:
  void pivot(Eigen::Index r, Eigen::Index col) {
    t_.row(r) /= t_(r, col);
    for (Eigen::Index i = 0; i <= rows_; ++i) {
      if (i != r && t_(i, col) != 0.0) t_.row(i) -= t_(i, col) * t_.row(r);
    }
    basis_[r] = col;
  }

  // Artificial columns never re-enter.
  void iterate() {
    std::size_t degenerate = 0;
    const std::size_t guard = 200 * static_cast<std::size_t>(rows_ + cols_) + 1000;
    for (std::size_t step = 0; step < guard; ++step) {
      const bool bland = degenerate > 20;
      Eigen::Index enter = -1;
      double most = -pivot_tol_;
      for (Eigen::Index j = 0; j < cols_; ++j) {
        if (t_(rows_, j) < most) {
          enter = j;
          if (bland) break;
          most = t_(rows_, j);
        }
      }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows_; ++i) {
        if (!alive_[i] || t_(i, enter) <= pivot_tol_) continue;
        const double ratio = t_(i, width_ - 1) / t_(i, enter);
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) throw NumericalError("simplex: problem is unbounded");
      degenerate = best <= 1e-15 ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
    throw NumericalError("simplex: iteration guard reached");
  }

  Eigen::Index rows_, cols_, width_;
  double pivot_tol_;
  Eigen::MatrixXd t_;  // [A | I | b], objective row last
  std::vector<Eigen::Index> basis_;
  std::vector<bool> alive_;
  bool feasible_ = false;
};

/// maximize cᵀx subject to A x = b, x ≥ 0.
inline LpSolution simplex_maximize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                                   double feas_tol = 1e-9) {
  EqualityLp lp(a, b, feas_tol);
  return lp.maximize(c);
}

}  // namespace stmod::oracle
