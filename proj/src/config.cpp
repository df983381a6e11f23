#include "hsrec/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hsrec/core.hpp"

namespace hsrec {

std::string to_string(KernelDistance v) {
  return v == KernelDistance::ChannelIndex ? "channel-index" : "nanometers";
}
std::string to_string(EtaQuadratic v) {
  return v == EtaQuadratic::PrecisionConsistent ? "precision-consistent"
                                                : "paper-literal";
}
std::string to_string(SPriorPrecision v) {
  return v == SPriorPrecision::Sampled ? "sampled" : "fixed";
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

KernelDistance parse_kernel_distance(const std::string& s) {
  if (s == "channel-index") return KernelDistance::ChannelIndex;
  if (s == "nanometers") return KernelDistance::Nanometers;
  throw std::invalid_argument("kernel_distance must be channel-index or nanometers");
}

EtaQuadratic parse_eta_quadratic(const std::string& s) {
  if (s == "precision-consistent") return EtaQuadratic::PrecisionConsistent;
  if (s == "paper-literal") return EtaQuadratic::PaperLiteral;
  throw std::invalid_argument(
      "eta_quadratic must be precision-consistent or paper-literal");
}

SPriorPrecision parse_s_prior(const std::string& s) {
  if (s == "sampled") return SPriorPrecision::Sampled;
  if (s == "fixed") return SPriorPrecision::Fixed;
  throw std::invalid_argument("s_prior_precision must be sampled or fixed");
}

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw std::invalid_argument("boolean value must be 0/1/true/false");
}

}  // namespace

void RunConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0))
      throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(a_o, "a_o");
  positive(b_o, "b_o");
  positive(c_o, "c_o");
  positive(d_o, "d_o");
  positive(e_o, "e_o");
  positive(f_o, "f_o");
  positive(g_o, "g_o");
  positive(h_o, "h_o");
  positive(lambda_eps_o, "lambda_eps_o");
  positive(lambda_s_o, "lambda_s_o");
  positive(ell, "ell");
  if (gibbs_iters <= 0) throw std::invalid_argument("gibbs_iters must be positive");
  if (burn_in < 0 || burn_in >= gibbs_iters)
    throw std::invalid_argument("burn_in must lie in [0, gibbs_iters)");
  if (clusters <= 0) throw std::invalid_argument("clusters must be positive");
  if (patch <= 0) throw std::invalid_argument("patch must be positive");
  if (k_total < clusters)
    throw std::invalid_argument("k_total must be at least the cluster count");
  if (!(pixel_fraction > 0.0 && pixel_fraction <= 1.0))
    throw std::invalid_argument("pixel_fraction must lie in (0, 1]");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (stride > patch) throw std::invalid_argument("stride must not exceed patch");
  if (kmeans_iters <= 0) throw std::invalid_argument("kmeans_iters must be positive");
  if (!(kmeans_tol >= 0.0)) throw std::invalid_argument("kmeans_tol must be >= 0");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  if (!(delta1 >= 0.0)) throw std::invalid_argument("delta1 must be >= 0");
  if (dict_epochs <= 0) throw std::invalid_argument("dict_epochs must be positive");
  if (threads < 0) throw std::invalid_argument("threads must be >= 0");
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os << "a_o=" << fmt(a_o) << "\n";
  os << "b_o=" << fmt(b_o) << "\n";
  os << "c_o=" << fmt(c_o) << "\n";
  os << "d_o=" << fmt(d_o) << "\n";
  os << "e_o=" << fmt(e_o) << "\n";
  os << "f_o=" << fmt(f_o) << "\n";
  os << "g_o=" << fmt(g_o) << "\n";
  os << "h_o=" << fmt(h_o) << "\n";
  os << "lambda_eps_o=" << fmt(lambda_eps_o) << "\n";
  os << "lambda_s_o=" << fmt(lambda_s_o) << "\n";
  os << "ell=" << fmt(ell) << "\n";
  os << "kernel_distance=" << to_string(kernel_distance) << "\n";
  os << "gibbs_iters=" << gibbs_iters << "\n";
  os << "burn_in=" << burn_in << "\n";
  os << "eta_quadratic=" << to_string(eta_quadratic) << "\n";
  os << "s_prior_precision=" << to_string(s_prior_precision) << "\n";
  os << "clusters=" << clusters << "\n";
  os << "patch=" << patch << "\n";
  os << "k_total=" << k_total << "\n";
  os << "pixel_fraction=" << fmt(pixel_fraction) << "\n";
  os << "stride=" << stride << "\n";
  os << "kmeans_iters=" << kmeans_iters << "\n";
  os << "kmeans_tol=" << fmt(kmeans_tol) << "\n";
  os << "kmeans_center=" << (kmeans_center ? 1 : 0) << "\n";
  os << "delta=" << fmt(delta) << "\n";
  os << "delta1=" << fmt(delta1) << "\n";
  os << "dict_epochs=" << dict_epochs << "\n";
  os << "dl_variant=" << (dl_variant ? 1 : 0) << "\n";
  os << "seed=" << seed << "\n";
  os << "threads=" << threads << "\n";
  return os.str();
}

void RunConfig::apply_line(const std::string& raw) {
  std::string line = raw;
  if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
  auto notspace = [](unsigned char c) { return !std::isspace(c); };
  line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
  while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back())))
    line.pop_back();
  if (line.empty()) return;

  auto eq = line.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("config line is not key=value: " + raw);
  std::string key = line.substr(0, eq);
  std::string val = line.substr(eq + 1);

  auto d = [&] { return std::stod(val); };
  auto i = [&] { return std::stoi(val); };

  if (key == "a_o") a_o = d();
  else if (key == "b_o") b_o = d();
  else if (key == "c_o") c_o = d();
  else if (key == "d_o") d_o = d();
  else if (key == "e_o") e_o = d();
  else if (key == "f_o") f_o = d();
  else if (key == "g_o") g_o = d();
  else if (key == "h_o") h_o = d();
  else if (key == "lambda_eps_o") lambda_eps_o = d();
  else if (key == "lambda_s_o") lambda_s_o = d();
  else if (key == "ell") ell = d();
  else if (key == "kernel_distance") kernel_distance = parse_kernel_distance(val);
  else if (key == "gibbs_iters") gibbs_iters = i();
  else if (key == "burn_in") burn_in = i();
  else if (key == "eta_quadratic") eta_quadratic = parse_eta_quadratic(val);
  else if (key == "s_prior_precision") s_prior_precision = parse_s_prior(val);
  else if (key == "clusters") clusters = i();
  else if (key == "patch") patch = i();
  else if (key == "k_total") k_total = i();
  else if (key == "pixel_fraction") pixel_fraction = d();
  else if (key == "stride") stride = i();
  else if (key == "kmeans_iters") kmeans_iters = i();
  else if (key == "kmeans_tol") kmeans_tol = d();
  else if (key == "kmeans_center") kmeans_center = parse_bool(val);
  else if (key == "delta") delta = d();
  else if (key == "delta1") delta1 = d();
  else if (key == "dict_epochs") dict_epochs = i();
  else if (key == "dl_variant") dl_variant = parse_bool(val);
  else if (key == "seed") seed = std::stoull(val);
  else if (key == "threads") threads = i();
  else throw std::invalid_argument("unknown config key: " + key);
}

void RunConfig::apply_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  std::string line;
  while (std::getline(in, line)) apply_line(line);
}

}  // namespace hsrec
