#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hsrec {

struct SparseCode {
  std::vector<int> indices;     // ascending
  std::vector<double> values;   // all >= 0
  double residual_norm = 0.0;   // ||y - D*beta||_2, recomputed on return
  bool infeasible = false;      // stopping constraint could not be met

  double l1() const;
  Eigen::VectorXd dense(int k) const;
};

// min ||beta||_1 surrogate: the non-negative homotopy path from beta = 0 is
// traced with decreasing regularization and stopped at the first point where
// ||y - D*beta||_2^2 <= delta1. If the path ends (or stalls) before the
// constraint is met, the path-end solution is returned with `infeasible` set.
SparseCode code_min_l1(const Eigen::VectorXd& y, const Eigen::MatrixXd& dict,
                       double delta1);

// Same path, stopped where ||beta||_1 reaches the budget `delta` (exactly,
// by interpolation inside the crossing segment).
SparseCode code_l1_budget(const Eigen::VectorXd& y, const Eigen::MatrixXd& dict,
                          double delta);

}  // namespace hsrec
