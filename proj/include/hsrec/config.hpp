#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hsrec {

enum class KernelDistance { ChannelIndex, Nanometers };
enum class EtaQuadratic { PrecisionConsistent, PaperLiteral };
enum class SPriorPrecision { Sampled, Fixed };

std::string to_string(KernelDistance v);
std::string to_string(EtaQuadratic v);
std::string to_string(SPriorPrecision v);

// Every tunable of the pipeline, flat. Field names double as the config-file
// keys and CLI flag names.
struct RunConfig {
  // Gamma/Beta hyper-priors
  double a_o = 1e-6;
  double b_o = 1e-6;
  double c_o = 1e-6;
  double d_o = 1e-6;
  double e_o = 1e-6;
  double f_o = 1e-6;
  double g_o = 1e-6;
  double h_o = 1e-6;
  double lambda_eps_o = 1e6;  // initial noise precision
  double lambda_s_o = 1e6;    // initial weight precision

  // Gaussian Process kernel
  double ell = 3.0;
  KernelDistance kernel_distance = KernelDistance::ChannelIndex;

  // sampler
  int gibbs_iters = 500;
  int burn_in = 250;
  EtaQuadratic eta_quadratic = EtaQuadratic::PrecisionConsistent;
  SPriorPrecision s_prior_precision = SPriorPrecision::Sampled;

  // preprocessing
  int clusters = 10;          // C
  int patch = 8;              // p
  int k_total = 1000;         // total atoms across clusters
  double pixel_fraction = 0.01;
  int stride = 2;             // test-time patch stride
  int kmeans_iters = 100;
  double kmeans_tol = 1e-6;
  bool kmeans_center = false;  // run k-means on mean-centered patch vectors

  // prior factorization / coding
  double delta = 0.01;    // l1 budget per training column
  double delta1 = 1e-21;  // squared-residual target at test time
  int dict_epochs = 10;

  bool dl_variant = false;  // use the factorization dictionary directly
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = library default

  void validate() const;  // throws std::invalid_argument

  // key=value serialization (one pair per line, keys as above)
  std::string serialize() const;
  // Parses key=value lines; '#' starts a comment. Unknown keys throw.
  void apply_line(const std::string& line);
  void apply_file(const std::string& path);

  bool operator==(const RunConfig&) const = default;
};

}  // namespace hsrec
