#include "hsrec/core.hpp"

#include <cmath>

namespace hsrec {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

HyperCube HyperCube::zeros(int rows, int cols, std::vector<double> wavelengths) {
  HyperCube c;
  c.rows = rows;
  c.cols = cols;
  c.bands = static_cast<int>(wavelengths.size());
  c.wavelengths = std::move(wavelengths);
  c.data.assign(c.value_count(), 0.0);
  c.validate();
  return c;
}

void HyperCube::validate() const {
  if (rows <= 0 || cols <= 0 || bands <= 0)
    throw std::invalid_argument("cube dimensions must be positive");
  if (static_cast<int>(wavelengths.size()) != bands)
    throw std::invalid_argument("wavelength grid length must equal band count");
  for (int b = 1; b < bands; ++b)
    if (!(wavelengths[b] > wavelengths[b - 1]))
      throw std::invalid_argument("wavelengths must be strictly increasing");
  if (data.size() != value_count())
    throw std::invalid_argument("data length must equal rows*cols*bands");
  if (!all_finite(wavelengths) || !all_finite(data))
    throw std::invalid_argument("cube contains non-finite values");
}

void SpectralTransform::validate() const {
  if (m.rows() <= 0 || m.cols() <= 0)
    throw std::invalid_argument("transform must be non-empty");
  // l < L in the recovery problem proper; l == L is accepted so identity
  // transforms work on 3-band cubes (RGB round trips, simulation tests).
  if (m.rows() > m.cols())
    throw std::invalid_argument("transform must not have more rows than columns");
  if (!m.allFinite())
    throw std::invalid_argument("transform contains non-finite values");
}

Spectrum pixel_at(const HyperCube& cube, int row, int col) {
  if (row < 0 || row >= cube.rows || col < 0 || col >= cube.cols)
    throw std::out_of_range("pixel index out of bounds");
  Spectrum s;
  s.values = Eigen::Map<const Eigen::VectorXd>(
      cube.data.data() + (static_cast<std::size_t>(row) * cube.cols + col) * cube.bands,
      cube.bands);
  s.wavelengths = &cube.wavelengths;
  return s;
}

Eigen::VectorXd apply_transform(const SpectralTransform& t,
                                const Eigen::VectorXd& s) {
  if (s.size() != t.m.cols())
    throw std::invalid_argument("spectrum length does not match transform columns");
  return t.m * s;
}

Spectrum apply_transform(const SpectralTransform& t, const Spectrum& s) {
  Spectrum out;
  out.values = apply_transform(t, s.values);
  out.wavelengths = nullptr;
  return out;
}

}  // namespace hsrec
