#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsrec {

// File/format problem; carries the byte offset where the problem was found
// (-1 when not applicable).
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg, std::int64_t byte_offset = -1)
      : std::runtime_error(byte_offset >= 0
                               ? msg + " (byte " + std::to_string(byte_offset) + ")"
                               : msg),
        offset_(byte_offset) {}
  std::int64_t offset() const { return offset_; }

 private:
  std::int64_t offset_;
};

// Numerical failure (factorization breakdown, non-finite sample, ...).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// M x N x L cube, pixel-major: data[(r*cols + c)*bands + b].
// Immutable by convention once constructed; safe to share across workers.
struct HyperCube {
  int rows = 0;
  int cols = 0;
  int bands = 0;
  std::vector<double> wavelengths;  // nm, strictly increasing, size == bands
  std::vector<double> data;         // rows*cols*bands

  static HyperCube zeros(int rows, int cols, std::vector<double> wavelengths);

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
  std::size_t value_count() const { return pixel_count() * bands; }

  double& at(int r, int c, int b) {
    return data[(static_cast<std::size_t>(r) * cols + c) * bands + b];
  }
  double at(int r, int c, int b) const {
    return data[(static_cast<std::size_t>(r) * cols + c) * bands + b];
  }

  // Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

// One pixel's values together with the grid they sample.
struct Spectrum {
  Eigen::VectorXd values;
  const std::vector<double>* wavelengths = nullptr;
};

// l x L map from hyperspectral to camera quantization (l = 3 rows).
struct SpectralTransform {
  Eigen::MatrixXd m;

  int channels() const { return static_cast<int>(m.rows()); }
  int bands() const { return static_cast<int>(m.cols()); }
  void validate() const;
};

// p x p x bands patch flattened pixel-major, with its source origin.
struct Patch {
  int side = 0;
  int bands = 0;
  int origin_row = 0;
  int origin_col = 0;
  int source = 0;
  Eigen::VectorXd vec;  // side*side*bands
};

Spectrum pixel_at(const HyperCube& cube, int row, int col);

Eigen::VectorXd apply_transform(const SpectralTransform& t,
                                const Eigen::VectorXd& s);
Spectrum apply_transform(const SpectralTransform& t, const Spectrum& s);

bool all_finite(const std::vector<double>& v);

}  // namespace hsrec
