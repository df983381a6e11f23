#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hsrec/core.hpp"
#include "hsrec/rng.hpp"

using namespace hsrec;

namespace {

HyperCube make_cube(int rows, int cols, std::vector<double> wl,
                    std::vector<double> data) {
  HyperCube c;
  c.rows = rows;
  c.cols = cols;
  c.bands = static_cast<int>(wl.size());
  c.wavelengths = std::move(wl);
  c.data = std::move(data);
  c.validate();
  return c;
}

}  // namespace

TEST_CASE("pixel_at identity layout") {
  HyperCube c = make_cube(1, 1, {400, 410, 420}, {1, 2, 3});
  Spectrum s = pixel_at(c, 0, 0);
  CHECK(s.values.size() == 3);
  CHECK(s.values[0] == 1.0);
  CHECK(s.values[1] == 2.0);
  CHECK(s.values[2] == 3.0);
  CHECK(s.wavelengths == &c.wavelengths);
}

TEST_CASE("pixel_at pixel-major layout") {
  // 2x1x2 cube, data [a,b,c,d]: pixel (1,0) owns the last two values
  HyperCube c = make_cube(2, 1, {400, 410}, {10, 11, 12, 13});
  Spectrum s = pixel_at(c, 1, 0);
  CHECK(s.values[0] == 12.0);
  CHECK(s.values[1] == 13.0);
}

TEST_CASE("pixel_at bounds error") {
  HyperCube c = make_cube(2, 1, {400, 410}, {0, 0, 0, 0});
  CHECK_THROWS_AS(pixel_at(c, 5, 0), std::out_of_range);
  CHECK_THROWS_AS(pixel_at(c, 0, 1), std::out_of_range);
  CHECK_THROWS_AS(pixel_at(c, -1, 0), std::out_of_range);
}

TEST_CASE("cube invariants rejected") {
  CHECK_THROWS_AS(make_cube(1, 1, {410, 400}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(make_cube(1, 1, {400, 410}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(make_cube(1, 1, {400}, {std::nan("")}), std::invalid_argument);
}

TEST_CASE("apply_transform identity") {
  SpectralTransform t;
  t.m = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd s(3);
  s << 1, 2, 3;
  Eigen::VectorXd out = apply_transform(t, s);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 2.0);
  CHECK(out[2] == 3.0);
}

TEST_CASE("apply_transform summation row") {
  SpectralTransform t;
  t.m = Eigen::MatrixXd::Ones(1, 5);
  Eigen::VectorXd s(5);
  s << 1, 2, 3, 4, 5;
  CHECK(apply_transform(t, s)[0] == doctest::Approx(15.0).epsilon(1e-15));
}

TEST_CASE("apply_transform matches brute-force triple loop") {
  Rng rng(42);
  Eigen::MatrixXd m(3, 28);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 28; ++c) m(r, c) = rng.uniform() * 2.0 - 1.0;
  Eigen::VectorXd s(28);
  for (int c = 0; c < 28; ++c) s[c] = rng.uniform() * 2.0 - 1.0;

  SpectralTransform t;
  t.m = m;
  Eigen::VectorXd got = apply_transform(t, s);

  for (int r = 0; r < 3; ++r) {
    double acc = 0.0;
    for (int c = 0; c < 28; ++c) acc += m(r, c) * s[c];
    CHECK(got[r] == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("apply_transform dimension mismatch") {
  SpectralTransform t;
  t.m = Eigen::MatrixXd::Ones(3, 5);
  Eigen::VectorXd s(4);
  s.setZero();
  CHECK_THROWS_AS(apply_transform(t, s), std::invalid_argument);
}

TEST_CASE("apply_transform is linear") {
  Rng rng(7);
  SpectralTransform t;
  t.m = Eigen::MatrixXd(3, 9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 9; ++c) t.m(r, c) = rng.uniform();
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(9), y(9);
    for (int c = 0; c < 9; ++c) {
      x[c] = rng.uniform() * 4.0 - 2.0;
      y[c] = rng.uniform() * 4.0 - 2.0;
    }
    double a = rng.uniform() * 3.0 - 1.5;
    double b = rng.uniform() * 3.0 - 1.5;
    Eigen::VectorXd lhs = apply_transform(t, Eigen::VectorXd(a * x + b * y));
    Eigen::VectorXd rhs = a * apply_transform(t, x) + b * apply_transform(t, y);
    double scale = std::max(1.0, rhs.norm());
    CHECK((lhs - rhs).norm() / scale <= 1e-12);
  }
}

TEST_CASE("transform with more rows than columns rejected") {
  SpectralTransform t;
  t.m = Eigen::MatrixXd::Ones(4, 3);
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}
