#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "hsrec/config.hpp"
#include "hsrec/core.hpp"
#include "hsrec/pipeline.hpp"

namespace hsrec {

struct ReconstructionReport {
  double rmse_8bit = 0.0;
  double relative_rmse = 0.0;
  double sam_degrees_mean = 0.0;
  std::vector<double> per_band_rmse;  // unscaled, per band
  double negative_fraction = 0.0;
  long infeasible_pixels = 0;
  long sam_skipped_pixels = 0;
  RunConfig config;
};

// RMSE over all entries. With `eightbit`, both cubes are first scaled by
// 255 / max(gt) so errors land in the 0..255 range of 8-bit images.
double rmse(const HyperCube& est, const HyperCube& gt, bool eightbit);

// sqrt(mean(((est-gt)/max(gt, floor))^2)); floor defaults to 1e-3 * max(gt).
double relative_rmse(const HyperCube& est, const HyperCube& gt,
                     double floor = -1.0);

// Angle between two spectra in degrees.
double sam_degrees(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Mean angle over pixels; pixels where either spectrum is all zero are
// skipped and counted.
double sam_mean(const HyperCube& est, const HyperCube& gt,
                long* skipped = nullptr);

std::vector<double> per_band_rmse(const HyperCube& est, const HyperCube& gt);

ReconstructionReport make_report(const HyperCube& est, const HyperCube& gt,
                                 const RunConfig& config,
                                 const ReconstructStats* stats = nullptr);

// key=value text, machine-parseable; config echoed under "config." keys.
void write_report(const ReconstructionReport& report, std::ostream& os);

}  // namespace hsrec
