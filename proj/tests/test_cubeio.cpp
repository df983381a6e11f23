#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hsrec/cubeio.hpp"
#include "hsrec/rng.hpp"

using namespace hsrec;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("hsrec_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() { static int c = 0; return c; }
};

HyperCube small_cube() {
  HyperCube c;
  c.rows = 2;
  c.cols = 2;
  c.bands = 3;
  c.wavelengths = {400, 410, 420};
  c.data.resize(12);
  for (int i = 0; i < 12; ++i) c.data[i] = i;
  c.validate();
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("cube round trip is exact") {
  TempDir dir;
  HyperCube c = small_cube();
  cubeio::write_cube(c, dir.file("a.hsc"));
  HyperCube back = cubeio::read_cube(dir.file("a.hsc"));
  CHECK(back.rows == c.rows);
  CHECK(back.cols == c.cols);
  CHECK(back.bands == c.bands);
  CHECK(back.wavelengths == c.wavelengths);
  CHECK(back.data == c.data);
}

TEST_CASE("cube round trip on binary32 values is bit-identical") {
  TempDir dir;
  Rng rng(3);
  HyperCube c = small_cube();
  for (auto& v : c.data)
    v = static_cast<double>(static_cast<float>(rng.uniform() * 7.3 - 2.1));
  c.wavelengths = {400.25, 512.125, 700.5};
  cubeio::write_cube(c, dir.file("b.hsc"));
  HyperCube back = cubeio::read_cube(dir.file("b.hsc"));
  CHECK(back.data == c.data);
  CHECK(back.wavelengths == c.wavelengths);
}

TEST_CASE("bad magic is a format error at byte 0") {
  TempDir dir;
  std::ofstream out(dir.file("bad.hsc"), std::ios::binary);
  out << "XXXX rows=1 cols=1 bands=1 wavelengths=400\n";
  out.write("\0\0\0\0", 4);
  out.close();
  try {
    cubeio::read_cube(dir.file("bad.hsc"));
    FAIL("expected io_error");
  } catch (const io_error& e) {
    CHECK(e.offset() == 0);
  }
}

TEST_CASE("truncated payload reports the failing offset") {
  TempDir dir;
  // header says 4 pixels (1 band), payload has 3
  std::string header = "HSC1 rows=2 cols=2 bands=1 wavelengths=500\n";
  std::ofstream out(dir.file("t.hsc"), std::ios::binary);
  out << header;
  out.write("\0\0\0\0\0\0\0\0\0\0\0\0", 12);
  out.close();
  try {
    cubeio::read_cube(dir.file("t.hsc"));
    FAIL("expected io_error");
  } catch (const io_error& e) {
    CHECK(e.offset() == static_cast<std::int64_t>(header.size()) + 12);
  }
}

TEST_CASE("inconsistent header is rejected") {
  TempDir dir;
  std::ofstream out(dir.file("w.hsc"), std::ios::binary);
  out << "HSC1 rows=1 cols=1 bands=2 wavelengths=400\n";
  out.write("\0\0\0\0\0\0\0\0", 8);
  out.close();
  CHECK_THROWS_AS(cubeio::read_cube(dir.file("w.hsc")), io_error);
}

TEST_CASE("response: identity table") {
  TempDir dir;
  std::ofstream out(dir.file("r.csv"));
  out << "400, 1, 0, 0\n410, 0, 1, 0\n420, 0, 0, 1\n";
  out.close();
  cubeio::Response resp = cubeio::read_response(dir.file("r.csv"));
  CHECK(resp.wavelengths == std::vector<double>{400, 410, 420});
  CHECK(resp.transform.m == Eigen::MatrixXd::Identity(3, 3));
}

TEST_CASE("response: shape and normalization") {
  TempDir dir;
  std::ofstream out(dir.file("r.csv"));
  for (int b = 0; b < 6; ++b)
    out << 400 + 10 * b << ", " << 0.5 + 0.1 * b << ", " << 1.0 << ", "
        << 2.0 - 0.2 * b << "\n";
  out.close();

  cubeio::Response resp = cubeio::read_response(dir.file("r.csv"));
  CHECK(resp.transform.channels() == 3);
  CHECK(resp.transform.bands() == 6);

  cubeio::Response norm = cubeio::read_response(dir.file("r.csv"), true);
  for (int ch = 0; ch < 3; ++ch)
    CHECK(norm.transform.m.row(ch).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("response: non-increasing wavelengths and short tables rejected") {
  TempDir dir;
  {
    std::ofstream out(dir.file("bad1.csv"));
    out << "410, 1, 1, 1\n400, 1, 1, 1\n";
  }
  CHECK_THROWS_AS(cubeio::read_response(dir.file("bad1.csv")), io_error);
  {
    std::ofstream out(dir.file("bad2.csv"));
    out << "400, 1, 1, 1\n";
  }
  CHECK_THROWS_AS(cubeio::read_response(dir.file("bad2.csv")), io_error);
}

TEST_CASE("response written then read applies like apply_transform") {
  TempDir dir;
  Rng rng(11);
  SpectralTransform t;
  t.m = Eigen::MatrixXd(3, 8);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 8; ++c) t.m(r, c) = rng.uniform();
  std::vector<double> wl;
  for (int b = 0; b < 8; ++b) wl.push_back(400 + 10 * b);
  cubeio::write_response(dir.file("t.csv"), t, wl);
  cubeio::Response resp = cubeio::read_response(dir.file("t.csv"));

  Eigen::VectorXd s(8);
  for (int c = 0; c < 8; ++c) s[c] = rng.uniform();
  Eigen::VectorXd a = apply_transform(resp.transform, s);
  // oracle: reloaded response is float32-quantized; compare against the
  // quantized transform applied per entry
  for (int r = 0; r < 3; ++r) {
    double acc = 0.0;
    for (int c = 0; c < 8; ++c) acc += resp.transform.m(r, c) * s[c];
    CHECK(a[r] == doctest::Approx(acc).epsilon(1e-14));
  }
}

TEST_CASE("pnm band export, auto scaling") {
  TempDir dir;
  HyperCube c = HyperCube::zeros(1, 2, {500});
  c.at(0, 0, 0) = 0.0;
  c.at(0, 1, 0) = 1.0;
  cubeio::export_band_pnm(c, 0, dir.file("g.pgm"));
  std::string bytes = slurp(dir.file("g.pgm"));
  CHECK(bytes == std::string("P5\n2 1\n255\n") + '\0' + '\xff');
}

TEST_CASE("pnm explicit range rounds half away from zero") {
  TempDir dir;
  HyperCube c = HyperCube::zeros(1, 1, {500});
  c.at(0, 0, 0) = 1.0;
  cubeio::export_band_pnm(c, 0, dir.file("m.pgm"), std::make_pair(0.0, 2.0));
  std::string bytes = slurp(dir.file("m.pgm"));
  CHECK(static_cast<unsigned char>(bytes.back()) == 128);
}

TEST_CASE("pnm header layout for 2x2 grayscale") {
  TempDir dir;
  HyperCube c = HyperCube::zeros(2, 2, {500});
  c.at(0, 0, 0) = 0;
  c.at(0, 1, 0) = 1;
  c.at(1, 0, 0) = 2;
  c.at(1, 1, 0) = 3;
  cubeio::export_band_pnm(c, 0, dir.file("h.pgm"));
  std::string bytes = slurp(dir.file("h.pgm"));
  CHECK(bytes.substr(0, 11) == "P5\n2 2\n255\n");
  CHECK(bytes.size() == 11 + 4);
}

TEST_CASE("pnm constant band warns and emits zeros") {
  TempDir dir;
  HyperCube c = HyperCube::zeros(1, 2, {500});
  c.at(0, 0, 0) = 5.0;
  c.at(0, 1, 0) = 5.0;
  cubeio::export_band_pnm(c, 0, dir.file("z.pgm"));
  std::string bytes = slurp(dir.file("z.pgm"));
  CHECK(bytes.substr(bytes.size() - 2) == std::string(2, '\0'));
}

TEST_CASE("rgb pnm export") {
  TempDir dir;
  HyperCube c = HyperCube::zeros(1, 1, {1, 2, 3});
  c.at(0, 0, 0) = 1.0;
  c.at(0, 0, 1) = 0.0;
  c.at(0, 0, 2) = 0.5;
  cubeio::export_rgb_pnm(c, dir.file("c.ppm"), std::make_pair(0.0, 1.0));
  std::string bytes = slurp(dir.file("c.ppm"));
  CHECK(bytes.substr(0, 11) == "P6\n1 1\n255\n");
  CHECK(static_cast<unsigned char>(bytes[11]) == 255);
  CHECK(static_cast<unsigned char>(bytes[12]) == 0);
  CHECK(static_cast<unsigned char>(bytes[13]) == 128);
}

TEST_CASE("model save/load round trip is bit-exact") {
  TempDir dir;
  Rng rng(5);
  TrainedModel m;
  m.config.clusters = 2;
  m.config.patch = 2;
  m.config.k_total = 5;
  m.config.seed = 99;
  m.config.dl_variant = true;
  m.wavelengths = {400, 410, 420, 430};
  m.transform.m = Eigen::MatrixXd(3, 4);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c)
      m.transform.m(r, c) = static_cast<float>(rng.uniform());
  m.clusters.resize(2);
  int ks[2] = {3, 2};
  for (int c = 0; c < 2; ++c) {
    ClusterModel& cm = m.clusters[c];
    cm.phi = Eigen::MatrixXd(4, ks[c]);
    for (int i = 0; i < cm.phi.size(); ++i)
      cm.phi.data()[i] = static_cast<float>(rng.uniform());
    cm.phi_rgb = (m.transform.m * cm.phi).unaryExpr(
        [](double v) { return double(float(v)); });
    cm.centroid = Eigen::VectorXd(2 * 2 * 3);
    for (int i = 0; i < cm.centroid.size(); ++i)
      cm.centroid[i] = static_cast<float>(rng.uniform());
    cm.usage = Eigen::VectorXd::Constant(ks[c], 0.5);
  }

  cubeio::save_model(m, dir.file("m.hsm"));
  TrainedModel back = cubeio::load_model(dir.file("m.hsm"));
  CHECK(back.config == m.config);
  CHECK(back.wavelengths == m.wavelengths);
  CHECK(back.transform.m == m.transform.m);
  for (int c = 0; c < 2; ++c) {
    CHECK(back.clusters[c].phi == m.clusters[c].phi);
    CHECK(back.clusters[c].phi_rgb == m.clusters[c].phi_rgb);
    CHECK(back.clusters[c].centroid == m.clusters[c].centroid);
  }

  // identical save -> identical bytes
  cubeio::save_model(back, dir.file("m2.hsm"));
  CHECK(slurp(dir.file("m.hsm")) == slurp(dir.file("m2.hsm")));
}

TEST_CASE("model with bad magic rejected") {
  TempDir dir;
  std::ofstream out(dir.file("x.hsm"), std::ios::binary);
  out << "NOPE\n";
  out.close();
  CHECK_THROWS_AS(cubeio::load_model(dir.file("x.hsm")), io_error);
}
