#include "hsrec/coder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hsrec {

double SparseCode::l1() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

Eigen::VectorXd SparseCode::dense(int k) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  for (std::size_t j = 0; j < indices.size(); ++j) b[indices[j]] = values[j];
  return b;
}

namespace {

enum class StopRule { ResidualBall, L1Budget };

constexpr double kTiny = 1e-12;

struct PathState {
  std::vector<int> active;
  Eigen::VectorXd beta;  // dense, K
  Eigen::VectorXd r;     // residual
  double lambda = 0.0;   // common active correlation
};

SparseCode finish(const Eigen::VectorXd& y, const Eigen::MatrixXd& dict,
                  const PathState& st, bool infeasible) {
  SparseCode code;
  for (int k = 0; k < dict.cols(); ++k)
    if (st.beta[k] != 0.0) {
      code.indices.push_back(k);
      code.values.push_back(st.beta[k]);
    }
  code.residual_norm = (y - dict * st.beta).norm();
  code.infeasible = infeasible;
  return code;
}

SparseCode trace_path(const Eigen::VectorXd& y, const Eigen::MatrixXd& dict,
                      StopRule rule, double threshold) {
  if (!y.allFinite() || !dict.allFinite())
    throw std::invalid_argument("sparse coder inputs must be finite");
  if (y.size() != dict.rows())
    throw std::invalid_argument("signal length does not match dictionary rows");
  const int K = static_cast<int>(dict.cols());

  PathState st;
  st.beta = Eigen::VectorXd::Zero(K);
  st.r = y;

  if (rule == StopRule::L1Budget && threshold <= 0.0)
    return finish(y, dict, st, false);
  if (rule == StopRule::ResidualBall && st.r.squaredNorm() <= threshold)
    return finish(y, dict, st, false);

  Eigen::VectorXd corr = dict.transpose() * st.r;
  int first = 0;
  for (int k = 1; k < K; ++k)
    if (corr[k] > corr[first]) first = k;
  if (!(corr[first] > kTiny)) {
    // nothing in the non-negative cone points toward y
    return finish(y, dict, st, rule == StopRule::ResidualBall);
  }
  st.lambda = corr[first];
  st.active.push_back(first);

  const int max_steps = 4 * K;
  int just_dropped = -1;
  int stall = 0;
  double prev_rss = st.r.squaredNorm();

  for (int step = 0; step < max_steps; ++step) {
    const int na = static_cast<int>(st.active.size());
    Eigen::MatrixXd sub(dict.rows(), na);
    for (int j = 0; j < na; ++j) sub.col(j) = dict.col(st.active[j]);
    Eigen::MatrixXd gram = sub.transpose() * sub;
    Eigen::VectorXd u = gram.ldlt().solve(Eigen::VectorXd::Ones(na));
    if (!u.allFinite()) break;
    Eigen::VectorXd dir = sub * u;  // residual decreases along dir
    double usum = u.sum();          // = dir.squaredNorm() up to roundoff

    // how far this segment can go before an active coefficient hits zero
    double gamma_drop = std::numeric_limits<double>::infinity();
    int drop_j = -1;
    for (int j = 0; j < na; ++j)
      if (u[j] < -kTiny) {
        double g = -st.beta[st.active[j]] / u[j];
        if (g < gamma_drop) { gamma_drop = g; drop_j = j; }
      }

    // ... or an inactive atom's correlation catches up
    double gamma_add = std::numeric_limits<double>::infinity();
    int add_k = -1;
    corr = dict.transpose() * st.r;
    for (int k = 0; k < K; ++k) {
      if (k == just_dropped) continue;
      bool is_active = std::find(st.active.begin(), st.active.end(), k) !=
                       st.active.end();
      if (is_active) continue;
      double a = dict.col(k).dot(dir);
      double denom = 1.0 - a;
      if (denom <= kTiny) continue;
      double g = (st.lambda - corr[k]) / denom;
      if (g < -kTiny) continue;
      g = std::max(g, 0.0);
      if (g < gamma_add) { gamma_add = g; add_k = k; }
    }

    double gamma = std::min({gamma_drop, gamma_add, st.lambda});

    // Stopping rules can trigger inside the segment. A crossing that lands
    // on the segment-end vertex up to roundoff still stops here.
    const double gamma_slack = gamma * (1.0 + 1e-9) + 1e-12;
    if (rule == StopRule::ResidualBall && usum > kTiny) {
      double rss = st.r.squaredNorm();
      double disc = st.lambda * st.lambda - (rss - threshold) / usum;
      if (disc >= 0.0) {
        double gamma_cross = st.lambda - std::sqrt(disc);
        if (gamma_cross >= 0.0 && gamma_cross <= gamma_slack) {
          gamma_cross = std::min(gamma_cross, gamma);
          for (int j = 0; j < na; ++j) st.beta[st.active[j]] += gamma_cross * u[j];
          st.r -= gamma_cross * dir;
          return finish(y, dict, st, false);
        }
      }
    } else if (rule == StopRule::L1Budget) {
      double l1 = st.beta.sum();
      if (usum > kTiny) {
        double gamma_budget = std::max(0.0, (threshold - l1) / usum);
        if (gamma_budget <= gamma_slack) {
          gamma_budget = std::min(gamma_budget, gamma);
          for (int j = 0; j < na; ++j) st.beta[st.active[j]] += gamma_budget * u[j];
          st.r -= gamma_budget * dir;
          return finish(y, dict, st, false);
        }
      }
    }

    for (int j = 0; j < na; ++j) st.beta[st.active[j]] += gamma * u[j];
    st.r -= gamma * dir;
    st.lambda -= gamma;

    double rss = st.r.squaredNorm();
    stall = rss < prev_rss - kTiny * (1.0 + prev_rss) ? 0 : stall + 1;
    prev_rss = rss;
    if (stall >= 3) break;

    if (gamma == gamma_drop && drop_j >= 0) {
      just_dropped = st.active[drop_j];
      st.beta[just_dropped] = 0.0;
      st.active.erase(st.active.begin() + drop_j);
      if (st.active.empty()) break;
    } else if (gamma == gamma_add && add_k >= 0) {
      st.active.push_back(add_k);
      just_dropped = -1;
    } else {
      // lambda reached zero: least-squares point on the active set
      break;
    }
    if (st.lambda <= kTiny * (1.0 + corr.cwiseAbs().maxCoeff())) break;
  }

  bool infeasible = rule == StopRule::ResidualBall &&
                    st.r.squaredNorm() > threshold + 1e-9 * (1.0 + threshold);
  return finish(y, dict, st, infeasible);
}

}  // namespace

SparseCode code_min_l1(const Eigen::VectorXd& y, const Eigen::MatrixXd& dict,
                       double delta1) {
  if (delta1 < 0.0) throw std::invalid_argument("delta1 must be >= 0");
  return trace_path(y, dict, StopRule::ResidualBall, delta1);
}

SparseCode code_l1_budget(const Eigen::VectorXd& y, const Eigen::MatrixXd& dict,
                          double delta) {
  if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
  return trace_path(y, dict, StopRule::L1Budget, delta);
}

}  // namespace hsrec
