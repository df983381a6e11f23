#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hsrec/core.hpp"

namespace hsrec {

struct PatchSet {
  int side = 0;
  int bands = 0;
  std::vector<Patch> patches;

  std::size_t size() const { return patches.size(); }
};

struct Clustering {
  int C = 0;
  std::vector<int> assignment;        // patch index -> cluster id
  Eigen::MatrixXd centroids;          // dim x C, patch space
  std::vector<double> objective_history;  // squared-distance sum per iteration

  std::vector<int> cluster_sizes() const;
  std::vector<int> members(int cluster) const;  // ascending patch indices
};

// Patch origins at multiples of `stride` with origin+p inside the image,
// row-major origin order.
PatchSet extract_patches(const HyperCube& cube, int p, int stride,
                         int source_id = 0);

// Appends patches from another image (same p) to an existing set.
void append_patches(PatchSet& set, const HyperCube& cube, int stride,
                    int source_id);

// Lloyd iterations with k-means++ seeding. Deterministic given seed.
Clustering kmeans(const PatchSet& set, int C, std::uint64_t seed,
                  int max_iters = 100, double tol = 1e-6, bool center = false);

// For each member patch, ceil(fraction*p^2) pixels chosen uniformly without
// replacement; spectra concatenated as columns (patch order, pixel index
// ascending within a patch).
Eigen::MatrixXd subsample_pixels(const PatchSet& set,
                                 const std::vector<int>& members,
                                 double fraction, std::uint64_t seed);

// Per-cluster mean of the pixel-wise transformed patches, (p*p*3) x C.
Eigen::MatrixXd rgb_centroids(const Clustering& clustering, const PatchSet& set,
                              const SpectralTransform& t);

// Argmin Euclidean distance, ties to the lowest cluster id.
int assign_cluster(const Eigen::VectorXd& rgb_patch,
                   const Eigen::MatrixXd& centroids);

// Per-cluster atom counts proportional to cluster size: floor shares with a
// minimum of one, largest-remainder adjustment so the total is k_total.
std::vector<int> atom_budget(const std::vector<int>& cluster_sizes, int k_total);

}  // namespace hsrec
