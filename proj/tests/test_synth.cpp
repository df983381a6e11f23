#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "hsrec/coder.hpp"
#include "hsrec/metrics.hpp"
#include "hsrec/synth.hpp"

using namespace hsrec;

TEST_CASE("noiseless sparsity-1 pixels are scaled atoms") {
  SynthSpec spec;
  spec.rows = 16;
  spec.cols = 16;
  spec.sparsity = 1;
  spec.noise_precision = std::numeric_limits<double>::infinity();
  spec.seed = 3;
  SynthData data = generate(spec);

  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols; ++c) {
      Eigen::Index px = static_cast<Eigen::Index>(r) * spec.cols + c;
      int atom = -1;
      for (int k = 0; k < spec.k_true; ++k)
        if (data.codes(k, px) > 0.0) atom = k;
      REQUIRE(atom >= 0);
      Spectrum s = pixel_at(data.cube, r, c);
      // arccos conditioning caps zero-angle precision near sqrt(eps)
      CHECK(sam_degrees(s.values, data.atoms.col(atom)) <= 3e-6);
    }
}

TEST_CASE("fixed seed reproduces the cube exactly") {
  SynthSpec spec;
  spec.rows = 12;
  spec.cols = 10;
  spec.seed = 42;
  SynthData a = generate(spec);
  SynthData b = generate(spec);
  CHECK(a.cube.data == b.cube.data);
  CHECK(a.atoms == b.atoms);
  CHECK(a.codes == b.codes);
}

TEST_CASE("noiseless decode with the true atoms recovers supports") {
  SynthSpec spec;
  spec.rows = 24;
  spec.cols = 24;
  spec.sparsity = 2;
  spec.noise_precision = std::numeric_limits<double>::infinity();
  spec.seed = 9;
  SynthData data = generate(spec);

  int correct = 0, total = 0;
  for (std::size_t px = 0; px < data.cube.pixel_count(); ++px) {
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
        data.cube.data.data() + px * spec.bands, spec.bands);
    SparseCode code = code_min_l1(y, data.atoms, 1e-18);
    std::vector<int> truth;
    for (int k = 0; k < spec.k_true; ++k)
      if (data.codes(k, static_cast<Eigen::Index>(px)) > 0.0) truth.push_back(k);
    ++total;
    // support above 1e-6 of the max coefficient; the stopping rule leaves
    // sqrt(delta1)-scale residue on path atoms
    double maxv = 0.0;
    for (double v : code.values) maxv = std::max(maxv, v);
    std::vector<int> got;
    for (std::size_t j = 0; j < code.indices.size(); ++j)
      if (code.values[j] > 1e-6 * maxv) got.push_back(code.indices[j]);
    if (got == truth) ++correct;
  }
  CHECK(static_cast<double>(correct) / total >= 0.99);
}

TEST_CASE("atoms are smooth: mean absolute second difference bounded") {
  SynthSpec spec;
  spec.seed = 5;
  SynthData data = generate(spec);
  const double bound = 1.0 / (spec.bump_min * spec.bump_min);
  for (int k = 0; k < spec.k_true; ++k) {
    double acc = 0.0;
    for (int l = 1; l + 1 < spec.bands; ++l)
      acc += std::abs(data.atoms(l + 1, k) - 2 * data.atoms(l, k) +
                      data.atoms(l - 1, k));
    CHECK(acc / (spec.bands - 2) <= bound);
  }
}

TEST_CASE("all generated values non-negative and finite") {
  SynthSpec spec;
  spec.noise_precision = 100.0;  // heavy noise exercises the clamp
  spec.seed = 11;
  SynthData data = generate(spec);
  for (double v : data.cube.data) {
    CHECK(v >= 0.0);
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("truth sidecar round trip") {
  SynthSpec spec;
  spec.rows = 8;
  spec.cols = 8;
  spec.seed = 21;
  SynthData data = generate(spec);
  auto path =
      (std::filesystem::temp_directory_path() / "hsrec_truth_test.hst").string();
  write_truth(data, path);
  SynthTruth t = read_truth(path);
  std::filesystem::remove(path);
  REQUIRE(t.atoms.rows() == data.atoms.rows());
  REQUIRE(t.atoms.cols() == data.atoms.cols());
  CHECK((t.atoms - data.atoms).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((t.codes - data.codes).cwiseAbs().maxCoeff() < 1e-6);
}
