#include "hsrec/model.hpp"

namespace hsrec {

void TrainedModel::validate() const {
  transform.validate();
  const int L = bands();
  if (transform.bands() != L)
    throw std::invalid_argument("transform columns must match band count");
  if (clusters.empty()) throw std::invalid_argument("model has no clusters");
  const int side = config.patch;
  for (const auto& c : clusters) {
    if (c.atoms() < 1) throw std::invalid_argument("cluster has no atoms");
    if (c.phi.rows() != L)
      throw std::invalid_argument("cluster phi row count must equal bands");
    if (c.phi_rgb.rows() != 3 || c.phi_rgb.cols() != c.phi.cols())
      throw std::invalid_argument("cluster phi_rgb must be 3 x K_c");
    if (c.centroid.size() != static_cast<Eigen::Index>(side) * side * 3)
      throw std::invalid_argument("cluster centroid must be p*p*3");
    if (c.usage.size() != c.phi.cols())
      throw std::invalid_argument("cluster usage must have one entry per atom");
    if (!c.phi.allFinite() || !c.phi_rgb.allFinite() || !c.centroid.allFinite())
      throw std::invalid_argument("cluster model contains non-finite values");
  }
  if (total_atoms() != config.k_total)
    throw std::invalid_argument("cluster atom counts must sum to k_total");
}

}  // namespace hsrec
