#include "hsrec/priors.hpp"

#include <cmath>
#include <iostream>
#include <numeric>

#include "hsrec/coder.hpp"
#include "hsrec/core.hpp"
#include "hsrec/rng.hpp"

namespace hsrec {

namespace {

Eigen::VectorXd normalized_or_uniform(Eigen::VectorXd v) {
  double n = v.norm();
  if (n > 0.0) return v / n;
  return Eigen::VectorXd::Constant(v.size(), 1.0 / std::sqrt(double(v.size())));
}

Eigen::MatrixXd init_dictionary(const Eigen::MatrixXd& y, int k, Rng& rng) {
  const int n = static_cast<int>(y.cols());
  const int L = static_cast<int>(y.rows());
  Eigen::MatrixXd d(L, k);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int j = 0; j < std::min(k, n); ++j) {
    int swap = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - j)));
    std::swap(order[j], order[swap]);
  }
  for (int j = 0; j < k; ++j) {
    if (j < n) {
      d.col(j) = normalized_or_uniform(y.col(order[j]));
    } else {
      // over-complete: perturbed copies of training columns
      Eigen::VectorXd v = y.col(order[j % n]);
      for (int i = 0; i < L; ++i) v[i] += 0.05 * rng.uniform();
      d.col(j) = normalized_or_uniform(v);
    }
  }
  return d;
}

}  // namespace

PriorFactorization factorize(const Eigen::MatrixXd& y, int k, double delta,
                             std::uint64_t seed, int epochs) {
  if (k < 1) throw std::invalid_argument("atom count must be >= 1");
  if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
  if (y.cols() < 1) throw std::invalid_argument("factorization needs data columns");
  if ((y.array() < 0.0).any())
    throw std::invalid_argument("training pixels must be non-negative");
  const int n = static_cast<int>(y.cols());
  if (k > n)
    std::cerr << "warning: over-complete factorization (" << k << " atoms from "
              << n << " columns)\n";

  Rng rng = Rng::stream(seed, 0x7072696f72ull);  // "prior"
  PriorFactorization f;
  f.delta = delta;
  f.d = init_dictionary(y, k, rng);
  f.a = Eigen::MatrixXd::Zero(k, n);

  double prev_obj = (y - f.d * f.a).squaredNorm();
  for (int epoch = 0; epoch < epochs; ++epoch) {
    // sparse-code every column; columns are independent
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      SparseCode code = code_l1_budget(y.col(i), f.d, delta);
      Eigen::VectorXd cand = code.dense(k);
      // a re-coded column never replaces a strictly better incumbent
      double old_r = (y.col(i) - f.d * f.a.col(i)).squaredNorm();
      double new_r = (y.col(i) - f.d * cand).squaredNorm();
      if (new_r <= old_r) f.a.col(i) = cand;
    }

    // block-coordinate dictionary update with projection onto
    // {d >= 0, ||d||_2 <= 1}
    Eigen::MatrixXd resid = y - f.d * f.a;
    std::vector<int> unused;
    for (int j = 0; j < k; ++j) {
      double n2 = f.a.row(j).squaredNorm();
      if (n2 <= 0.0) {
        unused.push_back(j);
        continue;
      }
      resid.noalias() += f.d.col(j) * f.a.row(j);
      Eigen::VectorXd d_new = (resid * f.a.row(j).transpose()) / n2;
      d_new = d_new.cwiseMax(0.0);
      double norm = d_new.norm();
      if (norm > 1.0) d_new /= norm;
      if (d_new.isZero(0.0)) d_new = f.d.col(j);  // keep the old atom alive
      f.d.col(j) = d_new;
      resid.noalias() -= f.d.col(j) * f.a.row(j);
    }
    // reseed unused atoms with the worst-reconstructed column
    for (int j : unused) {
      int worst = 0;
      double wr = resid.col(0).squaredNorm();
      for (int i = 1; i < n; ++i) {
        double rn = resid.col(i).squaredNorm();
        if (rn > wr) { wr = rn; worst = i; }
      }
      f.d.col(j) = normalized_or_uniform(y.col(worst));
    }

    double obj = (y - f.d * f.a).squaredNorm();
    if (obj > prev_obj + 1e-9 * (1.0 + prev_obj))
      throw numeric_error("factorization objective increased");
    f.objective_history.push_back(obj);
    prev_obj = obj;
  }
  return f;
}

}  // namespace hsrec
