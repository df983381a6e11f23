#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "hsrec/core.hpp"

namespace hsrec {

// Scene generator for desk-scale experiments: smooth non-negative atoms,
// block-sparse non-negative codes (patches cluster by support), additive
// Gaussian noise clamped at zero.
struct SynthSpec {
  int rows = 64;
  int cols = 64;
  int bands = 31;
  int k_true = 8;
  int sparsity = 2;          // active atoms per pixel
  double bump_min = 3.0;     // Gaussian bump width range, in channels
  double bump_max = 6.0;
  double noise_precision = 1e4;  // +inf means exactly noiseless
  int block = 8;             // support is constant on block x block tiles
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthData {
  HyperCube cube;
  Eigen::MatrixXd atoms;  // bands x k_true, unit l2 columns
  Eigen::MatrixXd codes;  // k_true x (rows*cols), pixel-major pixel order
};

SynthData generate(const SynthSpec& spec);

// Truth sidecar: one "HST1 ..." header line, then atoms and codes as
// binary32 little-endian column-major blobs.
void write_truth(const SynthData& data, const std::string& path);
struct SynthTruth {
  Eigen::MatrixXd atoms;
  Eigen::MatrixXd codes;
};
SynthTruth read_truth(const std::string& path);

}  // namespace hsrec
