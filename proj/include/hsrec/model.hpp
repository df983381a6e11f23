#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hsrec/config.hpp"
#include "hsrec/core.hpp"

namespace hsrec {

// One cluster's inferred Gaussian Process set.
struct ClusterModel {
  Eigen::MatrixXd phi;       // L x K_c posterior means
  Eigen::MatrixXd phi_rgb;   // 3 x K_c transformed means (T * phi)
  Eigen::VectorXd centroid;  // p*p*3 RGB patch centroid
  Eigen::VectorXd usage;     // K_c mean activation probability (diagnostic)

  int atoms() const { return static_cast<int>(phi.cols()); }
};

struct TrainedModel {
  RunConfig config;
  SpectralTransform transform;        // 3 x L
  std::vector<double> wavelengths;    // length L
  std::vector<ClusterModel> clusters;

  int bands() const { return static_cast<int>(wavelengths.size()); }
  int cluster_count() const { return static_cast<int>(clusters.size()); }
  int total_atoms() const {
    int n = 0;
    for (const auto& c : clusters) n += c.atoms();
    return n;
  }
  void validate() const;  // per-cluster dimension consistency
};

}  // namespace hsrec
