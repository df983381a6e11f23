#include "hsrec/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hsrec/rng.hpp"

namespace hsrec {

std::vector<int> Clustering::cluster_sizes() const {
  std::vector<int> n(C, 0);
  for (int a : assignment) ++n[a];
  return n;
}

std::vector<int> Clustering::members(int cluster) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    if (assignment[i] == cluster) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

std::vector<int> grid_origins(int extent, int p, int stride) {
  std::vector<int> origins;
  for (int r = 0; r + p <= extent; r += stride) origins.push_back(r);
  return origins;
}

}  // namespace

void append_patches(PatchSet& set, const HyperCube& cube, int stride,
                    int source_id) {
  const int p = set.side;
  cube.validate();
  if (p > cube.rows || p > cube.cols)
    throw std::invalid_argument("patch side exceeds image dimensions");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (set.bands != cube.bands)
    throw std::invalid_argument("cube band count does not match patch set");

  const auto row_origins = grid_origins(cube.rows, p, stride);
  const auto col_origins = grid_origins(cube.cols, p, stride);
  set.patches.reserve(set.patches.size() + row_origins.size() * col_origins.size());
  for (int r0 : row_origins)
    for (int c0 : col_origins) {
      Patch patch;
      patch.side = p;
      patch.bands = cube.bands;
      patch.origin_row = r0;
      patch.origin_col = c0;
      patch.source = source_id;
      patch.vec.resize(static_cast<Eigen::Index>(p) * p * cube.bands);
      Eigen::Index at = 0;
      for (int dr = 0; dr < p; ++dr)
        for (int dc = 0; dc < p; ++dc)
          for (int b = 0; b < cube.bands; ++b)
            patch.vec[at++] = cube.at(r0 + dr, c0 + dc, b);
      set.patches.push_back(std::move(patch));
    }
}

PatchSet extract_patches(const HyperCube& cube, int p, int stride,
                         int source_id) {
  if (p < 1) throw std::invalid_argument("patch side must be positive");
  PatchSet set;
  set.side = p;
  set.bands = cube.bands;
  append_patches(set, cube, stride, source_id);
  return set;
}

namespace {

double sq_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).squaredNorm();
}

// k-means++ choice of initial centroids
std::vector<int> seed_centroids(const Eigen::MatrixXd& x, int C, Rng& rng) {
  const int n = static_cast<int>(x.cols());
  std::vector<int> chosen;
  chosen.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) d2[i] = sq_dist(x.col(i), x.col(chosen[0]));
  while (static_cast<int>(chosen.size()) < C) {
    double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    int pick;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target) { pick = i; break; }
      }
    }
    chosen.push_back(pick);
    for (int i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], sq_dist(x.col(i), x.col(pick)));
  }
  return chosen;
}

}  // namespace

Clustering kmeans(const PatchSet& set, int C, std::uint64_t seed, int max_iters,
                  double tol, bool center) {
  const int n = static_cast<int>(set.size());
  if (C < 1) throw std::invalid_argument("cluster count must be positive");
  if (C > n) throw std::invalid_argument("more clusters than patches");

  const Eigen::Index dim = set.patches[0].vec.size();
  Eigen::MatrixXd x(dim, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = set.patches[i].vec;
    if (center) v.array() -= v.mean();
    x.col(i) = v;
  }

  Rng rng = Rng::stream(seed, 0x6b6d65616e73ull);  // "kmeans"
  std::vector<int> init = seed_centroids(x, C, rng);
  Eigen::MatrixXd centroids(dim, C);
  for (int c = 0; c < C; ++c) centroids.col(c) = x.col(init[c]);

  Clustering result;
  result.C = C;
  result.assignment.assign(n, 0);

  std::vector<double> best_dist(n, 0.0);
  for (int iter = 0; iter < max_iters; ++iter) {
    // assignment step; patches are independent of one another
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = sq_dist(x.col(i), centroids.col(0));
      for (int c = 1; c < C; ++c) {
        double d = sq_dist(x.col(i), centroids.col(c));
        if (d < bd) { bd = d; best = c; }
      }
      result.assignment[i] = best;
      best_dist[i] = bd;
    }

    // empty-cluster repair: reseed with the point farthest from its centroid
    std::vector<int> sizes(C, 0);
    for (int a : result.assignment) ++sizes[a];
    for (int c = 0; c < C; ++c) {
      if (sizes[c] > 0) continue;
      int far = -1;
      double fd = -1.0;
      for (int i = 0; i < n; ++i)
        if (sizes[result.assignment[i]] > 1 && best_dist[i] > fd) {
          fd = best_dist[i];
          far = i;
        }
      if (far < 0) continue;
      --sizes[result.assignment[far]];
      result.assignment[far] = c;
      sizes[c] = 1;
      best_dist[far] = 0.0;
      centroids.col(c) = x.col(far);
    }

    double objective = std::accumulate(best_dist.begin(), best_dist.end(), 0.0);
    if (!result.objective_history.empty() &&
        objective > result.objective_history.back() + 1e-9 * (1.0 + objective))
      throw numeric_error("k-means objective increased");
    result.objective_history.push_back(objective);

    // update step (serial accumulation keeps results thread-count independent)
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(dim, C);
    std::vector<int> counts(C, 0);
    for (int i = 0; i < n; ++i) {
      sums.col(result.assignment[i]) += x.col(i);
      ++counts[result.assignment[i]];
    }
    double shift = 0.0;
    for (int c = 0; c < C; ++c) {
      Eigen::VectorXd updated =
          counts[c] > 0 ? Eigen::VectorXd(sums.col(c) / counts[c])
                        : Eigen::VectorXd(centroids.col(c));
      double rel = (updated - centroids.col(c)).norm() /
                   std::max(1.0, centroids.col(c).norm());
      shift = std::max(shift, rel);
      centroids.col(c) = updated;
    }
    if (shift < tol) break;
  }

  // final assignment against the converged centroids
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double bd = sq_dist(x.col(i), centroids.col(0));
    for (int c = 1; c < C; ++c) {
      double d = sq_dist(x.col(i), centroids.col(c));
      if (d < bd) { bd = d; best = c; }
    }
    result.assignment[i] = best;
  }
  result.centroids = std::move(centroids);
  return result;
}

Eigen::MatrixXd subsample_pixels(const PatchSet& set,
                                 const std::vector<int>& members,
                                 double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("fraction must lie in (0, 1]");
  const int p2 = set.side * set.side;
  const int per_patch = static_cast<int>(std::ceil(fraction * p2));
  const int L = set.bands;

  Eigen::MatrixXd out(L, static_cast<Eigen::Index>(members.size()) * per_patch);
  Rng rng = Rng::stream(seed, 0x7375627375ull);  // "subsu"
  std::vector<int> idx(p2);
  Eigen::Index col = 0;
  for (int m : members) {
    const Patch& patch = set.patches[m];
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates, then ascending order for a canonical layout
    for (int j = 0; j < per_patch; ++j) {
      int swap = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(p2 - j)));
      std::swap(idx[j], idx[swap]);
    }
    std::sort(idx.begin(), idx.begin() + per_patch);
    for (int j = 0; j < per_patch; ++j) {
      out.col(col++) = patch.vec.segment(static_cast<Eigen::Index>(idx[j]) * L, L);
    }
  }
  return out;
}

Eigen::MatrixXd rgb_centroids(const Clustering& clustering, const PatchSet& set,
                              const SpectralTransform& t) {
  if (clustering.assignment.size() != set.size())
    throw std::invalid_argument("clustering does not match patch set");
  if (t.bands() != set.bands)
    throw std::invalid_argument("transform bands do not match patch set");
  const int p2 = set.side * set.side;
  const int l = t.channels();
  const int L = set.bands;

  Eigen::MatrixXd sums =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p2) * l, clustering.C);
  std::vector<int> counts(clustering.C, 0);
  Eigen::VectorXd transformed(static_cast<Eigen::Index>(p2) * l);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Patch& patch = set.patches[i];
    for (int px = 0; px < p2; ++px)
      transformed.segment(static_cast<Eigen::Index>(px) * l, l) =
          t.m * patch.vec.segment(static_cast<Eigen::Index>(px) * L, L);
    sums.col(clustering.assignment[i]) += transformed;
    ++counts[clustering.assignment[i]];
  }
  for (int c = 0; c < clustering.C; ++c) {
    if (counts[c] == 0)
      throw numeric_error("cluster " + std::to_string(c) + " is empty");
    sums.col(c) /= counts[c];
  }
  return sums;
}

int assign_cluster(const Eigen::VectorXd& rgb_patch,
                   const Eigen::MatrixXd& centroids) {
  if (rgb_patch.size() != centroids.rows())
    throw std::invalid_argument("patch dimension does not match centroids");
  int best = 0;
  double bd = (rgb_patch - centroids.col(0)).squaredNorm();
  for (int c = 1; c < centroids.cols(); ++c) {
    double d = (rgb_patch - centroids.col(c)).squaredNorm();
    if (d < bd) { bd = d; best = c; }
  }
  return best;
}

std::vector<int> atom_budget(const std::vector<int>& cluster_sizes, int k_total) {
  const int C = static_cast<int>(cluster_sizes.size());
  if (C == 0) throw std::invalid_argument("no clusters");
  if (k_total < C) throw std::invalid_argument("k_total smaller than cluster count");
  const double total =
      std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), 0.0);
  if (total <= 0.0) throw std::invalid_argument("empty clustering");

  std::vector<int> k(C);
  std::vector<double> remainder(C);
  int assigned = 0;
  for (int c = 0; c < C; ++c) {
    double share = k_total * cluster_sizes[c] / total;
    k[c] = std::max(1, static_cast<int>(std::floor(share)));
    remainder[c] = share - std::floor(share);
    assigned += k[c];
  }
  std::vector<int> order(C);
  std::iota(order.begin(), order.end(), 0);
  if (assigned < k_total) {
    // hand out the leftovers by largest remainder, ties to the lower id
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return remainder[a] > remainder[b];
    });
    for (int j = 0; assigned < k_total; j = (j + 1) % C) {
      ++k[order[j]];
      ++assigned;
    }
  } else if (assigned > k_total) {
    // the floor-of-one guarantee can overshoot; trim smallest remainders
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return remainder[a] < remainder[b];
    });
    for (int j = 0; assigned > k_total; j = (j + 1) % C) {
      if (k[order[j]] > 1) {
        --k[order[j]];
        --assigned;
      }
    }
  }
  return k;
}

}  // namespace hsrec
