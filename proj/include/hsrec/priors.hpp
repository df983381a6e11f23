#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace hsrec {

// Non-negative sparse factorization Y ~= D*A with per-column ||a_i||_1 <= delta
// and unit-ball atoms. Columns of `d` seed the Gaussian Process prior means;
// entries of `a` seed the weight prior means.
struct PriorFactorization {
  Eigen::MatrixXd d;  // L x K, entries >= 0, column norms <= 1
  Eigen::MatrixXd a;  // K x N, entries >= 0, column l1 <= delta
  double delta = 0.0;
  std::vector<double> objective_history;  // ||Y - D*A||_F^2 per epoch

  int atoms() const { return static_cast<int>(d.cols()); }
};

PriorFactorization factorize(const Eigen::MatrixXd& y, int k, double delta,
                             std::uint64_t seed, int epochs = 10);

}  // namespace hsrec
