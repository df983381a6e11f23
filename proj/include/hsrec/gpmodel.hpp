#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hsrec/config.hpp"
#include "hsrec/core.hpp"
#include "hsrec/priors.hpp"
#include "hsrec/rng.hpp"

namespace hsrec {

// Stationary exponential correlation over the band axis,
// R[a,b] = exp(-dist(a,b)/(2*ell^2)), with its inverse cached. The per-atom
// kernel is R/eta_k; eta_k is sampled, so only R is shared.
class KernelMatrix {
 public:
  KernelMatrix(int bands, double ell, KernelDistance mode,
               const std::vector<double>& wavelengths);

  const Eigen::MatrixXd& r() const { return r_; }
  const Eigen::MatrixXd& r_inv() const { return r_inv_; }
  int bands() const { return static_cast<int>(r_.rows()); }

 private:
  Eigen::MatrixXd r_;
  Eigen::MatrixXd r_inv_;
};

struct GammaParams {
  double shape = 0.0;
  double rate = 0.0;
  double mean() const { return shape / rate; }
};

struct BetaParams {
  double a = 0.0;
  double b = 0.0;
  double mean() const { return a / (a + b); }
};

struct NormalParams {
  double mean = 0.0;
  double precision = 0.0;
};

struct PhiParams {
  Eigen::VectorXd mean;
  Eigen::MatrixXd precision;  // eta_k * R^{-1} + data_scalar * I
};

struct PosteriorSummary {
  Eigen::MatrixXd phi_mean;  // L x K average of post-burn-in samples
  Eigen::VectorXd usage;     // K   average of post-burn-in pi samples
  double lambda_eps_final = 0.0;
  double lambda_s_final = 0.0;
};

// All latent variables of the representation model for one cluster, plus the
// conditional-distribution algebra used by the sweep. Conditional parameters
// are exposed so tests can check them against independent oracles.
class GibbsChain {
 public:
  GibbsChain(Eigen::MatrixXd y, const PriorFactorization& priors,
             const KernelMatrix& kernel, const RunConfig& cfg);

  int atom_count() const { return K_; }
  int sample_count() const { return N_; }
  int band_count() const { return L_; }

  // y_i - Phi(z_i .* s_i) + phi_k z_ik s_ik
  Eigen::VectorXd residual_with_atom(int i, int k) const;

  PhiParams phi_conditional(int k) const;
  GammaParams eta_conditional(int k) const;
  double z_probability(int i, int k) const;
  NormalParams s_conditional(int i, int k) const;
  BetaParams pi_conditional(int k) const;
  GammaParams lambda_s_conditional() const;
  GammaParams lambda_eps_conditional() const;

  // draw without committing (state untouched, only the rng advances)
  Eigen::VectorXd draw_phi(int k, Rng& rng) const;
  double draw_eta(int k, Rng& rng) const;
  int draw_z(int i, int k, Rng& rng) const;
  double draw_s(int i, int k, Rng& rng) const;
  double draw_pi(int k, Rng& rng) const;
  double draw_lambda_s(Rng& rng) const;
  double draw_lambda_eps(Rng& rng) const;

  // one full sweep in the order: phi_k, eta_k, (z_ik, s_ik), pi_k,
  // lambda_s, lambda_eps
  void sweep(Rng& rng);

  void recompute_residual();
  const Eigen::MatrixXd& residual() const { return resid_; }

  // Replaces the data the chain conditions on (same shape); used by
  // simulation-based checks that alternate data and parameter draws.
  void set_data(Eigen::MatrixXd y);

  // state (mutable for tests that freeze specific configurations)
  Eigen::MatrixXd phi;               // L x K
  Eigen::MatrixXd s;                 // K x N
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> z;  // K x N
  Eigen::VectorXd pi;                // K
  Eigen::VectorXd eta;               // K
  double lambda_s = 0.0;
  double lambda_eps = 0.0;

  const Eigen::MatrixXd& data() const { return y_; }
  const Eigen::MatrixXd& prior_atom_means() const { return mu0_; }
  const Eigen::MatrixXd& prior_weight_means() const { return mu_s0_; }

 private:
  double s_prior_precision() const {
    return cfg_.s_prior_precision == SPriorPrecision::Sampled ? lambda_s
                                                              : cfg_.lambda_s_o;
  }

  Eigen::MatrixXd y_;      // L x N
  Eigen::MatrixXd mu0_;    // L x K
  Eigen::MatrixXd mu_s0_;  // K x N
  const KernelMatrix& kernel_;
  RunConfig cfg_;
  int L_ = 0, K_ = 0, N_ = 0;
  Eigen::MatrixXd resid_;  // y - Phi(z .* s), maintained incrementally
};

// Runs the chain and averages Phi (and pi) over post-burn-in sweeps.
// Aborts with diagnostics if any sample goes non-finite.
PosteriorSummary run_gibbs(const Eigen::MatrixXd& y,
                           const PriorFactorization& priors,
                           const RunConfig& cfg,
                           const std::vector<double>& wavelengths, Rng& rng);

}  // namespace hsrec
