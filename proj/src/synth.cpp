#include "hsrec/synth.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "hsrec/rng.hpp"

namespace hsrec {

void SynthSpec::validate() const {
  if (rows < 1 || cols < 1 || bands < 2)
    throw std::invalid_argument("synth scene dimensions too small");
  if (k_true < 1) throw std::invalid_argument("k_true must be >= 1");
  if (sparsity < 1 || sparsity > k_true)
    throw std::invalid_argument("sparsity must lie in [1, k_true]");
  if (!(bump_min > 0.0) || bump_max < bump_min)
    throw std::invalid_argument("bad bump width range");
  if (!(noise_precision > 0.0))
    throw std::invalid_argument("noise precision must be positive");
  if (block < 1) throw std::invalid_argument("block must be >= 1");
}

namespace {

Eigen::MatrixXd make_atoms(const SynthSpec& spec, Rng& rng) {
  Eigen::MatrixXd atoms(spec.bands, spec.k_true);
  for (int k = 0; k < spec.k_true; ++k) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(spec.bands);
    int bumps = 1 + static_cast<int>(rng.below(3));
    for (int j = 0; j < bumps; ++j) {
      double center = rng.uniform() * (spec.bands - 1);
      double width =
          spec.bump_min + rng.uniform() * (spec.bump_max - spec.bump_min);
      double amp = 0.5 + rng.uniform();
      for (int l = 0; l < spec.bands; ++l) {
        double d = (l - center) / width;
        a[l] += amp * std::exp(-0.5 * d * d);
      }
    }
    atoms.col(k) = a / a.norm();
  }
  return atoms;
}

}  // namespace

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng = Rng::stream(spec.seed, 0x73796e7468ull);  // "synth"

  SynthData out;
  out.atoms = make_atoms(spec, rng);
  out.codes = Eigen::MatrixXd::Zero(spec.k_true,
                                    static_cast<Eigen::Index>(spec.rows) * spec.cols);

  // block-constant supports with mild per-pixel weight variation
  for (int br = 0; br < spec.rows; br += spec.block)
    for (int bc = 0; bc < spec.cols; bc += spec.block) {
      std::vector<int> support;
      std::vector<int> pool(spec.k_true);
      for (int k = 0; k < spec.k_true; ++k) pool[k] = k;
      for (int j = 0; j < spec.sparsity; ++j) {
        int pick = j + static_cast<int>(
                           rng.below(static_cast<std::uint64_t>(spec.k_true - j)));
        std::swap(pool[j], pool[pick]);
        support.push_back(pool[j]);
      }
      std::vector<double> base(spec.sparsity);
      for (int j = 0; j < spec.sparsity; ++j) base[j] = 0.5 + rng.uniform();

      int rmax = std::min(spec.rows, br + spec.block);
      int cmax = std::min(spec.cols, bc + spec.block);
      for (int r = br; r < rmax; ++r)
        for (int c = bc; c < cmax; ++c) {
          Eigen::Index px = static_cast<Eigen::Index>(r) * spec.cols + c;
          for (int j = 0; j < spec.sparsity; ++j)
            out.codes(support[j], px) = base[j] * (0.85 + 0.3 * rng.uniform());
        }
    }

  std::vector<double> grid(spec.bands);
  for (int b = 0; b < spec.bands; ++b) grid[b] = 400.0 + 10.0 * b;
  out.cube = HyperCube::zeros(spec.rows, spec.cols, grid);

  const bool noiseless = !std::isfinite(spec.noise_precision);
  const double sd = noiseless ? 0.0 : 1.0 / std::sqrt(spec.noise_precision);
  for (int r = 0; r < spec.rows; ++r)
    for (int c = 0; c < spec.cols; ++c) {
      Eigen::Index px = static_cast<Eigen::Index>(r) * spec.cols + c;
      Eigen::VectorXd y = out.atoms * out.codes.col(px);
      for (int b = 0; b < spec.bands; ++b) {
        double v = y[b] + (noiseless ? 0.0 : rng.normal(0.0, sd));
        out.cube.at(r, c, b) = std::max(0.0, v);
      }
    }
  return out;
}

namespace {

void store_f32_le(float v, unsigned char* p) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  p[0] = u & 0xff;
  p[1] = (u >> 8) & 0xff;
  p[2] = (u >> 16) & 0xff;
  p[3] = (u >> 24) & 0xff;
}

float load_f32_le(const unsigned char* p) {
  std::uint32_t u = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                    (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
  float v;
  std::memcpy(&v, &u, 4);
  return v;
}

void write_matrix(std::ofstream& out, const Eigen::MatrixXd& m) {
  std::vector<unsigned char> buf(static_cast<std::size_t>(m.size()) * 4);
  std::size_t at = 0;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      store_f32_le(static_cast<float>(m(r, c)), &buf[at]);
      at += 4;
    }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

Eigen::MatrixXd read_matrix(std::ifstream& in, int rows, int cols) {
  std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols * 4);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    throw io_error("truth sidecar truncated");
  Eigen::MatrixXd m(rows, cols);
  std::size_t at = 0;
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      m(r, c) = load_f32_le(&buf[at]);
      at += 4;
    }
  return m;
}

}  // namespace

void write_truth(const SynthData& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open truth file for writing: " + path);
  out << "HST1 bands=" << data.atoms.rows() << " atoms=" << data.atoms.cols()
      << " pixels=" << data.codes.cols() << "\n";
  write_matrix(out, data.atoms);
  write_matrix(out, data.codes);
  if (!out) throw io_error("write failed: " + path);
}

SynthTruth read_truth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open truth file: " + path);
  std::string magic;
  in >> magic;
  if (magic != "HST1") throw io_error("bad truth magic", 0);
  int bands = 0, atoms = 0;
  long pixels = 0;
  std::string tok;
  while (in.peek() != '\n' && (in >> tok)) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw io_error("malformed truth header: " + tok);
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "bands") bands = std::stoi(val);
    else if (key == "atoms") atoms = std::stoi(val);
    else if (key == "pixels") pixels = std::stol(val);
    else throw io_error("unknown truth header key: " + key);
  }
  in.get();  // newline
  if (bands < 1 || atoms < 1 || pixels < 1)
    throw io_error("incomplete truth header");
  SynthTruth t;
  t.atoms = read_matrix(in, bands, atoms);
  t.codes = read_matrix(in, atoms, static_cast<int>(pixels));
  return t;
}

}  // namespace hsrec
