#include "hsrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace hsrec {

namespace {

void check_same_shape(const HyperCube& est, const HyperCube& gt) {
  if (est.rows != gt.rows || est.cols != gt.cols || est.bands != gt.bands)
    throw std::invalid_argument("cubes must have identical dimensions");
}

double global_max(const HyperCube& cube) {
  double m = cube.data.empty() ? 0.0 : cube.data[0];
  for (double v : cube.data) m = std::max(m, v);
  return m;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double rmse(const HyperCube& est, const HyperCube& gt, bool eightbit) {
  check_same_shape(est, gt);
  double scale = 1.0;
  if (eightbit) {
    double m = global_max(gt);
    if (m > 0.0) scale = 255.0 / m;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < gt.data.size(); ++i) {
    double d = (est.data[i] - gt.data[i]) * scale;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(gt.data.size()));
}

double relative_rmse(const HyperCube& est, const HyperCube& gt, double floor) {
  check_same_shape(est, gt);
  if (floor < 0.0) floor = 1e-3 * global_max(gt);
  double acc = 0.0;
  for (std::size_t i = 0; i < gt.data.size(); ++i) {
    double denom = std::max(gt.data[i], floor);
    double d = (est.data[i] - gt.data[i]) / denom;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(gt.data.size()));
}

double sam_degrees(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("spectra must have equal length");
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("SAM is undefined for zero spectra");
  double cosv = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return std::acos(cosv) * 180.0 / M_PI;
}

double sam_mean(const HyperCube& est, const HyperCube& gt, long* skipped) {
  check_same_shape(est, gt);
  long skip = 0;
  double acc = 0.0;
  long used = 0;
  const int L = gt.bands;
  for (std::size_t px = 0; px < gt.pixel_count(); ++px) {
    Eigen::Map<const Eigen::VectorXd> a(est.data.data() + px * L, L);
    Eigen::Map<const Eigen::VectorXd> b(gt.data.data() + px * L, L);
    if (a.norm() == 0.0 || b.norm() == 0.0) {
      ++skip;
      continue;
    }
    acc += sam_degrees(a, b);
    ++used;
  }
  if (skipped) *skipped = skip;
  return used > 0 ? acc / used : 0.0;
}

std::vector<double> per_band_rmse(const HyperCube& est, const HyperCube& gt) {
  check_same_shape(est, gt);
  std::vector<double> out(gt.bands, 0.0);
  for (std::size_t px = 0; px < gt.pixel_count(); ++px)
    for (int b = 0; b < gt.bands; ++b) {
      double d = est.data[px * gt.bands + b] - gt.data[px * gt.bands + b];
      out[b] += d * d;
    }
  for (double& v : out) v = std::sqrt(v / static_cast<double>(gt.pixel_count()));
  return out;
}

ReconstructionReport make_report(const HyperCube& est, const HyperCube& gt,
                                 const RunConfig& config,
                                 const ReconstructStats* stats) {
  ReconstructionReport r;
  r.rmse_8bit = rmse(est, gt, true);
  r.relative_rmse = relative_rmse(est, gt);
  r.sam_degrees_mean = sam_mean(est, gt, &r.sam_skipped_pixels);
  r.per_band_rmse = per_band_rmse(est, gt);
  r.config = config;
  if (stats) {
    r.negative_fraction = stats->negative_fraction;
    r.infeasible_pixels = stats->infeasible_pixels;
  } else {
    std::size_t neg = 0;
    for (double v : est.data)
      if (v < 0.0) ++neg;
    r.negative_fraction = static_cast<double>(neg) / est.data.size();
  }
  return r;
}

void write_report(const ReconstructionReport& report, std::ostream& os) {
  os << "rmse_8bit=" << fmt(report.rmse_8bit) << "\n";
  os << "relative_rmse=" << fmt(report.relative_rmse) << "\n";
  os << "sam_degrees_mean=" << fmt(report.sam_degrees_mean) << "\n";
  std::ostringstream bands;
  for (std::size_t i = 0; i < report.per_band_rmse.size(); ++i) {
    if (i) bands << ",";
    bands << fmt(report.per_band_rmse[i]);
  }
  os << "per_band_rmse=" << bands.str() << "\n";
  os << "negative_fraction=" << fmt(report.negative_fraction) << "\n";
  os << "infeasible_pixels=" << report.infeasible_pixels << "\n";
  os << "sam_skipped_pixels=" << report.sam_skipped_pixels << "\n";
  // scaling convention recorded for auditability
  os << "rmse_8bit_scaling=255_over_gt_global_max\n";
  std::istringstream cfg(report.config.serialize());
  std::string line;
  while (std::getline(cfg, line)) os << "config." << line << "\n";
}

}  // namespace hsrec
