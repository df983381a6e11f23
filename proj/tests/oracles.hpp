// Test-only oracles, written independently of the library implementations
// they check. Brute force and plain loops on purpose.
#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <vector>

namespace hsrec_oracles {

struct CodeCand {
  std::vector<int> support;  // ascending, only strictly positive entries
  double rss = 0.0;
  double l1 = 0.0;
};

inline CodeCand nnls_support1(const Eigen::VectorXd& y, const Eigen::MatrixXd& d,
                              int j) {
  double g = d.col(j).squaredNorm();
  double b = d.col(j).dot(y);
  double beta = g > 0.0 ? std::max(0.0, b / g) : 0.0;
  CodeCand c;
  if (beta > 0.0) c.support = {j};
  c.l1 = beta;
  c.rss = (y - beta * d.col(j)).squaredNorm();
  return c;
}

inline CodeCand nnls_support2(const Eigen::VectorXd& y, const Eigen::MatrixXd& d,
                              int j1, int j2) {
  double g11 = d.col(j1).squaredNorm(), g22 = d.col(j2).squaredNorm();
  double g12 = d.col(j1).dot(d.col(j2));
  double b1 = d.col(j1).dot(y), b2 = d.col(j2).dot(y);
  double det = g11 * g22 - g12 * g12;
  CodeCand best;
  best.rss = std::numeric_limits<double>::infinity();
  auto consider = [&](double beta1, double beta2) {
    if (beta1 < 0.0 || beta2 < 0.0) return;
    double rss = (y - beta1 * d.col(j1) - beta2 * d.col(j2)).squaredNorm();
    if (rss < best.rss) {
      best.rss = rss;
      best.l1 = beta1 + beta2;
      best.support.clear();
      if (beta1 > 0.0) best.support.push_back(j1);
      if (beta2 > 0.0) best.support.push_back(j2);
    }
  };
  if (std::abs(det) > 1e-12 * std::max(1.0, g11 * g22))
    consider((g22 * b1 - g12 * b2) / det, (g11 * b2 - g12 * b1) / det);
  CodeCand e1 = nnls_support1(y, d, j1);
  CodeCand e2 = nnls_support1(y, d, j2);
  if (e1.rss < best.rss) best = e1;
  if (e2.rss < best.rss) best = e2;
  return best;
}

// exact interpolation on a full support of size m (m = rows)
inline std::optional<CodeCand> exact_support_m(const Eigen::VectorXd& y,
                                               const Eigen::MatrixXd& d,
                                               const std::vector<int>& idx) {
  const int m = static_cast<int>(y.size());
  Eigen::MatrixXd sub(m, m);
  for (int j = 0; j < m; ++j) sub.col(j) = d.col(idx[j]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
  if (!lu.isInvertible()) return std::nullopt;
  Eigen::VectorXd beta = lu.solve(y);
  CodeCand c;
  for (int j = 0; j < m; ++j) {
    if (beta[j] < 0.0) return std::nullopt;
    if (beta[j] > 0.0) c.support.push_back(idx[j]);
    c.l1 += beta[j];
  }
  Eigen::VectorXd r = y - sub * beta;
  c.rss = r.squaredNorm();
  std::sort(c.support.begin(), c.support.end());
  return c;
}

// Minimal-l1 non-negative code within the residual ball, brute force over
// all supports up to the row count (basic solutions). Only supports row
// counts up to 3, which is all the coder tests use.
inline std::optional<CodeCand> min_l1_code(const Eigen::VectorXd& y,
                                           const Eigen::MatrixXd& d,
                                           double delta1) {
  const int K = static_cast<int>(d.cols());
  const int m = static_cast<int>(y.size());
  const double tol = delta1 + 1e-9 * (1.0 + delta1);
  std::vector<CodeCand> feasible;

  CodeCand zero;
  zero.rss = y.squaredNorm();
  if (zero.rss <= tol) feasible.push_back(zero);
  for (int j = 0; j < K; ++j) {
    CodeCand c = nnls_support1(y, d, j);
    if (c.rss <= tol) feasible.push_back(c);
  }
  for (int j1 = 0; j1 < K; ++j1)
    for (int j2 = j1 + 1; j2 < K; ++j2) {
      CodeCand c = nnls_support2(y, d, j1, j2);
      if (c.rss <= tol) feasible.push_back(c);
    }
  if (m == 3) {
    for (int j1 = 0; j1 < K; ++j1)
      for (int j2 = j1 + 1; j2 < K; ++j2)
        for (int j3 = j2 + 1; j3 < K; ++j3) {
          auto c = exact_support_m(y, d, {j1, j2, j3});
          if (c && c->rss <= tol) feasible.push_back(*c);
        }
  }
  if (feasible.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < feasible.size(); ++i)
    if (feasible[i].l1 < feasible[best].l1 - 1e-12) best = i;
  return feasible[best];
}

// Gauss-Jordan inverse with partial pivoting; plain loops, no Eigen solvers.
inline Eigen::MatrixXd gj_inverse(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    a.row(col).swap(a.row(piv));
    inv.row(col).swap(inv.row(piv));
    double p = a(col, col);
    for (int c = 0; c < n; ++c) {
      a(col, c) /= p;
      inv(col, c) /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a(r, col);
      for (int c = 0; c < n; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

}  // namespace hsrec_oracles
