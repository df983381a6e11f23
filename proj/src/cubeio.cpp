#include "hsrec/cubeio.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace hsrec::cubeio {

namespace {

constexpr const char* kCubeMagic = "HSC1";
constexpr const char* kModelMagic = "HSM1";

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void store_f32_le(float v, unsigned char* out) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  out[0] = static_cast<unsigned char>(u & 0xff);
  out[1] = static_cast<unsigned char>((u >> 8) & 0xff);
  out[2] = static_cast<unsigned char>((u >> 16) & 0xff);
  out[3] = static_cast<unsigned char>((u >> 24) & 0xff);
}

float load_f32_le(const unsigned char* in) {
  std::uint32_t u = static_cast<std::uint32_t>(in[0]) |
                    (static_cast<std::uint32_t>(in[1]) << 8) |
                    (static_cast<std::uint32_t>(in[2]) << 16) |
                    (static_cast<std::uint32_t>(in[3]) << 24);
  float v;
  std::memcpy(&v, &u, 4);
  return v;
}

std::vector<double> parse_wavelength_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw io_error("empty wavelength entry");
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw io_error("bad wavelength entry: " + tok);
    out.push_back(v);
  }
  return out;
}

std::string join_wavelengths(const std::vector<double>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ',';
    s += fmt(w[i]);
  }
  return s;
}

// payload <-> doubles
void write_f32_payload(std::ofstream& out, const std::vector<double>& data) {
  std::vector<unsigned char> buf(data.size() * 4);
  for (std::size_t i = 0; i < data.size(); ++i)
    store_f32_le(static_cast<float>(data[i]), &buf[i * 4]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

}  // namespace

HyperCube read_cube(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open cube file: " + path);

  std::string header;
  if (!std::getline(in, header))
    throw io_error("cube file has no header line", 0);
  std::int64_t payload_start = static_cast<std::int64_t>(header.size()) + 1;

  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != kCubeMagic)
    throw io_error("bad cube magic (expected HSC1, got '" + magic + "')", 0);

  HyperCube cube;
  std::string tok;
  bool saw_rows = false, saw_cols = false, saw_bands = false, saw_wl = false;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw io_error("malformed cube header token: " + tok, 0);
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "rows") { cube.rows = std::stoi(val); saw_rows = true; }
    else if (key == "cols") { cube.cols = std::stoi(val); saw_cols = true; }
    else if (key == "bands") { cube.bands = std::stoi(val); saw_bands = true; }
    else if (key == "wavelengths") {
      cube.wavelengths = parse_wavelength_list(val);
      saw_wl = true;
    } else {
      throw io_error("unknown cube header key: " + key, 0);
    }
  }
  if (!saw_rows || !saw_cols || !saw_bands || !saw_wl)
    throw io_error("cube header is missing required fields", 0);
  if (cube.rows <= 0 || cube.cols <= 0 || cube.bands <= 0)
    throw io_error("cube header has non-positive dimensions", 0);
  if (static_cast<int>(cube.wavelengths.size()) != cube.bands)
    throw io_error("cube header wavelength count does not match bands", 0);

  std::size_t n = cube.value_count();
  std::vector<unsigned char> buf(n * 4);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  std::size_t got = static_cast<std::size_t>(in.gcount());
  if (got != buf.size())
    throw io_error("cube payload truncated: expected " + std::to_string(buf.size()) +
                       " bytes, found " + std::to_string(got),
                   payload_start + static_cast<std::int64_t>(got));
  char extra;
  if (in.read(&extra, 1))
    throw io_error("cube payload longer than header declares",
                   payload_start + static_cast<std::int64_t>(buf.size()));

  cube.data.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    cube.data[i] = static_cast<double>(load_f32_le(&buf[i * 4]));
  cube.validate();
  return cube;
}

void write_cube(const HyperCube& cube, const std::string& path) {
  cube.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open cube file for writing: " + path);
  out << kCubeMagic << " rows=" << cube.rows << " cols=" << cube.cols
      << " bands=" << cube.bands
      << " wavelengths=" << join_wavelengths(cube.wavelengths) << "\n";
  write_f32_payload(out, cube.data);
  if (!out) throw io_error("write failed: " + path);
}

Response read_response(const std::string& path, bool normalize_rows) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open response file: " + path);

  std::vector<double> wl;
  std::vector<std::array<double, 3>> rgb;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
    if (blank) continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    double w, r, g, b;
    if (!(ls >> w >> r >> g >> b))
      throw io_error("response line " + std::to_string(lineno) +
                     " is not 'wavelength, r, g, b'");
    std::string rest;
    if (ls >> rest)
      throw io_error("response line " + std::to_string(lineno) + " has extra fields");
    if (!std::isfinite(w) || !std::isfinite(r) || !std::isfinite(g) || !std::isfinite(b))
      throw io_error("response line " + std::to_string(lineno) + " has non-finite values");
    wl.push_back(w);
    rgb.push_back({r, g, b});
  }
  if (wl.size() < 2) throw io_error("response table needs at least 2 rows");
  for (std::size_t i = 1; i < wl.size(); ++i)
    if (!(wl[i] > wl[i - 1]))
      throw io_error("response wavelengths must be strictly increasing");

  Response resp;
  resp.wavelengths = wl;
  resp.transform.m = Eigen::MatrixXd(3, static_cast<int>(wl.size()));
  for (std::size_t j = 0; j < wl.size(); ++j)
    for (int ch = 0; ch < 3; ++ch) resp.transform.m(ch, static_cast<int>(j)) = rgb[j][ch];
  if (normalize_rows) {
    for (int ch = 0; ch < 3; ++ch) {
      double s = resp.transform.m.row(ch).sum();
      if (s == 0.0) throw io_error("cannot normalize response: row sums to zero");
      resp.transform.m.row(ch) /= s;
    }
  }
  resp.transform.validate();
  return resp;
}

void write_response(const std::string& path, const SpectralTransform& t,
                    const std::vector<double>& wavelengths) {
  t.validate();
  if (static_cast<int>(wavelengths.size()) != t.bands() || t.channels() != 3)
    throw std::invalid_argument("response table needs a 3-row transform and matching grid");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open response file for writing: " + path);
  for (int j = 0; j < t.bands(); ++j)
    out << fmt(wavelengths[j]) << ", " << fmt(t.m(0, j)) << ", " << fmt(t.m(1, j))
        << ", " << fmt(t.m(2, j)) << "\n";
  if (!out) throw io_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// model container

namespace {

struct BlobRef {
  int rows = 0;
  int cols = 0;
  std::int64_t offset = -1;
};

std::string blob_spec(const BlobRef& b) {
  return std::to_string(b.rows) + "x" + std::to_string(b.cols) + "@" +
         std::to_string(b.offset);
}

BlobRef parse_blob_spec(const std::string& s) {
  BlobRef b;
  auto x = s.find('x');
  auto at = s.find('@');
  if (x == std::string::npos || at == std::string::npos || at < x)
    throw io_error("malformed matrix spec: " + s);
  b.rows = std::stoi(s.substr(0, x));
  b.cols = std::stoi(s.substr(x + 1, at - x - 1));
  b.offset = std::stoll(s.substr(at + 1));
  if (b.rows <= 0 || b.cols <= 0 || b.offset < 0)
    throw io_error("malformed matrix spec: " + s);
  return b;
}

void append_matrix(std::vector<double>& payload, const Eigen::MatrixXd& m,
                   BlobRef& ref) {
  ref.rows = static_cast<int>(m.rows());
  ref.cols = static_cast<int>(m.cols());
  ref.offset = static_cast<std::int64_t>(payload.size()) * 4;
  for (int c = 0; c < m.cols(); ++c)
    for (int r = 0; r < m.rows(); ++r) payload.push_back(m(r, c));
}

Eigen::MatrixXd extract_matrix(const std::vector<unsigned char>& payload,
                               const BlobRef& ref) {
  std::size_t need = static_cast<std::size_t>(ref.offset) +
                     static_cast<std::size_t>(ref.rows) * ref.cols * 4;
  if (ref.offset % 4 != 0 || need > payload.size())
    throw io_error("matrix blob out of payload bounds", ref.offset);
  Eigen::MatrixXd m(ref.rows, ref.cols);
  const unsigned char* p = payload.data() + ref.offset;
  for (int c = 0; c < ref.cols; ++c)
    for (int r = 0; r < ref.rows; ++r) {
      m(r, c) = static_cast<double>(load_f32_le(p));
      p += 4;
    }
  return m;
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
  model.validate();
  std::vector<double> payload;
  BlobRef t_ref;
  append_matrix(payload, model.transform.m, t_ref);

  struct ClusterRefs {
    BlobRef phi, phi_rgb, centroid, usage;
  };
  std::vector<ClusterRefs> refs(model.clusters.size());
  for (std::size_t c = 0; c < model.clusters.size(); ++c) {
    const ClusterModel& cm = model.clusters[c];
    append_matrix(payload, cm.phi, refs[c].phi);
    append_matrix(payload, cm.phi_rgb, refs[c].phi_rgb);
    append_matrix(payload, cm.centroid, refs[c].centroid);
    append_matrix(payload, cm.usage, refs[c].usage);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open model file for writing: " + path);
  out << kModelMagic << "\n";
  out << "version=1\n";
  out << model.config.serialize();
  out << "bands=" << model.bands() << "\n";
  out << "wavelengths=" << join_wavelengths(model.wavelengths) << "\n";
  out << "cluster_count=" << model.cluster_count() << "\n";
  out << "transform=" << blob_spec(t_ref) << "\n";
  for (std::size_t c = 0; c < model.clusters.size(); ++c) {
    std::string pre = "cluster" + std::to_string(c) + ".";
    out << pre << "k=" << model.clusters[c].atoms() << "\n";
    out << pre << "phi=" << blob_spec(refs[c].phi) << "\n";
    out << pre << "phi_rgb=" << blob_spec(refs[c].phi_rgb) << "\n";
    out << pre << "centroid=" << blob_spec(refs[c].centroid) << "\n";
    out << pre << "usage=" << blob_spec(refs[c].usage) << "\n";
  }
  out << "end\n";
  write_f32_payload(out, payload);
  if (!out) throw io_error("write failed: " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open model file: " + path);

  std::string line;
  if (!std::getline(in, line) || line != kModelMagic)
    throw io_error("bad model magic (expected HSM1)", 0);

  std::map<std::string, std::string> kv;
  std::int64_t header_bytes = static_cast<std::int64_t>(line.size()) + 1;
  bool saw_end = false;
  while (std::getline(in, line)) {
    header_bytes += static_cast<std::int64_t>(line.size()) + 1;
    if (line == "end") { saw_end = true; break; }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw io_error("malformed model header line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!saw_end) throw io_error("model header missing 'end' terminator", header_bytes);

  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw io_error("model header missing key: " + key);
    return it->second;
  };

  if (need("version") != "1")
    throw io_error("unsupported model version: " + need("version"));

  TrainedModel model;
  auto is_blob_key = [](const std::string& key) {
    // per-cluster entries look like "cluster<i>.<field>"
    return key.rfind("cluster", 0) == 0 && key.size() > 7 &&
           std::isdigit(static_cast<unsigned char>(key[7]));
  };
  for (const auto& [key, val] : kv) {
    if (key == "version" || key == "bands" || key == "wavelengths" ||
        key == "cluster_count" || key == "transform" || is_blob_key(key))
      continue;
    model.config.apply_line(key + "=" + val);
  }
  int bands = std::stoi(need("bands"));
  model.wavelengths = parse_wavelength_list(need("wavelengths"));
  if (static_cast<int>(model.wavelengths.size()) != bands)
    throw io_error("model wavelength count does not match bands");
  int cluster_count = std::stoi(need("cluster_count"));
  if (cluster_count <= 0) throw io_error("model has no clusters");

  std::vector<unsigned char> payload(
      (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  model.transform.m = extract_matrix(payload, parse_blob_spec(need("transform")));
  model.clusters.resize(cluster_count);
  for (int c = 0; c < cluster_count; ++c) {
    std::string pre = "cluster" + std::to_string(c) + ".";
    int k = std::stoi(need(pre + "k"));
    ClusterModel& cm = model.clusters[c];
    cm.phi = extract_matrix(payload, parse_blob_spec(need(pre + "phi")));
    cm.phi_rgb = extract_matrix(payload, parse_blob_spec(need(pre + "phi_rgb")));
    cm.centroid = extract_matrix(payload, parse_blob_spec(need(pre + "centroid")));
    cm.usage = extract_matrix(payload, parse_blob_spec(need(pre + "usage")));
    if (cm.atoms() != k)
      throw io_error("cluster " + std::to_string(c) + " atom count mismatch");
  }
  model.validate();
  return model;
}

// ---------------------------------------------------------------------------
// PNM export

namespace {

unsigned char scale_to_byte(double v, double lo, double hi) {
  double t = (v - lo) / (hi - lo) * 255.0;
  double r = std::floor(std::abs(t) + 0.5);  // half away from zero
  if (t < 0) r = -r;
  if (r < 0.0) r = 0.0;
  if (r > 255.0) r = 255.0;
  return static_cast<unsigned char>(r);
}

std::pair<double, double> band_range(const HyperCube& cube, int b0, int b1) {
  double lo = cube.data[b0], hi = cube.data[b0];
  for (int r = 0; r < cube.rows; ++r)
    for (int c = 0; c < cube.cols; ++c)
      for (int b = b0; b <= b1; ++b) {
        double v = cube.at(r, c, b);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  return {lo, hi};
}

}  // namespace

void export_band_pnm(const HyperCube& cube, int band, const std::string& path,
                     std::optional<std::pair<double, double>> range) {
  cube.validate();
  if (band < 0 || band >= cube.bands)
    throw std::invalid_argument("band index out of range");

  double lo, hi;
  if (range) {
    lo = range->first;
    hi = range->second;
    if (!(hi > lo)) throw std::invalid_argument("export range must have hi > lo");
  } else {
    double mn = cube.at(0, 0, band), mx = mn;
    for (int r = 0; r < cube.rows; ++r)
      for (int c = 0; c < cube.cols; ++c) {
        double v = cube.at(r, c, band);
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
    lo = mn;
    hi = mx;
    if (!(hi > lo)) {
      std::cerr << "warning: band " << band
                << " is constant; exporting all-zero image\n";
      hi = lo + 1.0;  // maps everything to 0
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open image file for writing: " + path);
  out << "P5\n" << cube.cols << " " << cube.rows << "\n255\n";
  for (int r = 0; r < cube.rows; ++r)
    for (int c = 0; c < cube.cols; ++c) {
      unsigned char px = scale_to_byte(cube.at(r, c, band), lo, hi);
      out.write(reinterpret_cast<const char*>(&px), 1);
    }
  if (!out) throw io_error("write failed: " + path);
}

void export_rgb_pnm(const HyperCube& cube3, const std::string& path,
                    std::optional<std::pair<double, double>> range) {
  cube3.validate();
  if (cube3.bands != 3)
    throw std::invalid_argument("RGB export needs a 3-band cube");

  double lo, hi;
  if (range) {
    lo = range->first;
    hi = range->second;
    if (!(hi > lo)) throw std::invalid_argument("export range must have hi > lo");
  } else {
    auto [mn, mx] = band_range(cube3, 0, 2);
    lo = mn;
    hi = mx;
    if (!(hi > lo)) {
      std::cerr << "warning: cube is constant; exporting all-zero image\n";
      hi = lo + 1.0;
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open image file for writing: " + path);
  out << "P6\n" << cube3.cols << " " << cube3.rows << "\n255\n";
  for (int r = 0; r < cube3.rows; ++r)
    for (int c = 0; c < cube3.cols; ++c)
      for (int b = 0; b < 3; ++b) {
        unsigned char px = scale_to_byte(cube3.at(r, c, b), lo, hi);
        out.write(reinterpret_cast<const char*>(&px), 1);
      }
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace hsrec::cubeio
