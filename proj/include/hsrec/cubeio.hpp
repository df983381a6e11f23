#pragma once

#include <optional>
#include <string>
#include <utility>

#include "hsrec/core.hpp"
#include "hsrec/model.hpp"

namespace hsrec::cubeio {

// ---- HSC1 cube container -------------------------------------------------
// One text header line:
//   HSC1 rows=<R> cols=<C> bands=<B> wavelengths=<w0>,<w1>,...\n
// followed by R*C*B IEEE-754 binary32 little-endian values, pixel-major.
HyperCube read_cube(const std::string& path);
void write_cube(const HyperCube& cube, const std::string& path);

// ---- spectral response table ----------------------------------------------
// Text rows "wavelength_nm, r, g, b"; '#' lines are comments. Produces the
// 3 x L transform with rows (r,g,b) and columns ordered by wavelength.
struct Response {
  SpectralTransform transform;
  std::vector<double> wavelengths;
};
Response read_response(const std::string& path, bool normalize_rows = false);
void write_response(const std::string& path, const SpectralTransform& t,
                    const std::vector<double>& wavelengths);

// ---- model container (HSM1) -----------------------------------------------
// Text metadata section terminated by "end", then raw binary32 little-endian
// column-major matrix blobs at byte offsets declared in the metadata
// (offsets are relative to the first payload byte).
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

// ---- 8-bit PNM export -------------------------------------------------------
// Linear scaling to 0..255 over [lo,hi] (min-max of the data when absent),
// rounding half away from zero. A constant band under auto-scaling exports
// as all zeros with a warning on stderr.
void export_band_pnm(const HyperCube& cube, int band, const std::string& path,
                     std::optional<std::pair<double, double>> range = {});
void export_rgb_pnm(const HyperCube& cube3, const std::string& path,
                    std::optional<std::pair<double, double>> range = {});

}  // namespace hsrec::cubeio
