#pragma once

#include <cstdint>
#include <vector>

#include "hsrec/config.hpp"
#include "hsrec/core.hpp"
#include "hsrec/model.hpp"

namespace hsrec {

struct ReconstructStats {
  long infeasible_pixels = 0;   // pixels with at least one infeasible code
  double negative_fraction = 0; // fraction of negative output values
};

struct TrainInfo {
  std::vector<int> atoms;          // K_c per cluster
  std::vector<double> lambda_eps;  // final noise precision per cluster
  std::vector<int> pixels;         // training pixels per cluster
  double seconds = 0.0;
};

// Training phase: disjoint patches -> k-means clusters -> per cluster
// subsampled pixels, prior factorization and (unless dl_variant) the Gibbs
// chain. Cluster chains run in parallel on independent RNG streams.
TrainedModel train(const std::vector<HyperCube>& cubes,
                   const SpectralTransform& t, const RunConfig& cfg,
                   TrainInfo* info = nullptr);

// Testing phase: overlapping stride-grid patches are matched to clusters,
// every pixel of every patch is sparse-coded over the matched transformed
// atoms, and overlapping estimates are averaged. OpenMP over output pixels;
// results are identical for any thread count.
HyperCube reconstruct(const TrainedModel& model, const HyperCube& rgb,
                      int stride, ReconstructStats* stats = nullptr);

// Straightforward serial transcription of the testing phase (patch loop),
// kept as the reference the parallel kernel is tested against.
HyperCube reconstruct_reference(const TrainedModel& model, const HyperCube& rgb,
                                int stride, ReconstructStats* stats = nullptr);

// Per-pixel application of the spectral transform; the RGB protocol used to
// derive test inputs from ground-truth cubes.
HyperCube simulate_rgb(const HyperCube& cube, const SpectralTransform& t);

// Least-squares transform from paired pixels: T = ((Yh^T)^+ Y^T)^T.
SpectralTransform estimate_transform(const Eigen::MatrixXd& rgb,
                                     const Eigen::MatrixXd& hs);

// Patch origins covering one axis: multiples of stride, plus a clamped final
// origin so margins are covered.
std::vector<int> patch_origins(int extent, int p, int stride);

}  // namespace hsrec
