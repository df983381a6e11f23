#include "hsrec/gpmodel.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace hsrec {

KernelMatrix::KernelMatrix(int bands, double ell, KernelDistance mode,
                           const std::vector<double>& wavelengths) {
  if (bands < 1) throw std::invalid_argument("kernel needs at least one band");
  if (!(ell > 0.0)) throw std::invalid_argument("kernel length-scale must be positive");
  if (mode == KernelDistance::Nanometers &&
      static_cast<int>(wavelengths.size()) != bands)
    throw std::invalid_argument("nanometer kernel needs the wavelength grid");

  r_.resize(bands, bands);
  const double denom = 2.0 * ell * ell;
  for (int a = 0; a < bands; ++a)
    for (int b = 0; b < bands; ++b) {
      double dist = mode == KernelDistance::ChannelIndex
                        ? std::abs(a - b)
                        : std::abs(wavelengths[b] - wavelengths[a]);
      r_(a, b) = std::exp(-dist / denom);
    }

  Eigen::LLT<Eigen::MatrixXd> llt(r_);
  if (llt.info() != Eigen::Success)
    throw numeric_error("kernel correlation matrix is not positive definite");
  r_inv_ = llt.solve(Eigen::MatrixXd::Identity(bands, bands));
}

GibbsChain::GibbsChain(Eigen::MatrixXd y, const PriorFactorization& priors,
                       const KernelMatrix& kernel, const RunConfig& cfg)
    : y_(std::move(y)),
      mu0_(priors.d),
      mu_s0_(priors.a),
      kernel_(kernel),
      cfg_(cfg) {
  L_ = static_cast<int>(y_.rows());
  K_ = static_cast<int>(mu0_.cols());
  N_ = static_cast<int>(y_.cols());
  if (mu0_.rows() != L_)
    throw std::invalid_argument("prior atom means do not match band count");
  if (mu_s0_.rows() != K_ || mu_s0_.cols() != N_)
    throw std::invalid_argument("prior weight means must be K x N");
  if (kernel_.bands() != L_)
    throw std::invalid_argument("kernel size does not match band count");

  phi = mu0_;
  s = mu_s0_;
  z.resize(K_, N_);
  for (int i = 0; i < N_; ++i)
    for (int k = 0; k < K_; ++k) z(k, i) = s(k, i) != 0.0 ? 1 : 0;
  pi = Eigen::VectorXd::Constant(K_, 0.5);
  eta = Eigen::VectorXd::Constant(K_, cfg_.a_o / cfg_.b_o);
  lambda_s = cfg_.lambda_s_o;
  lambda_eps = cfg_.lambda_eps_o;
  recompute_residual();
}

void GibbsChain::recompute_residual() {
  Eigen::MatrixXd alpha = s.cwiseProduct(z.cast<double>());
  resid_ = y_ - phi * alpha;
}

void GibbsChain::set_data(Eigen::MatrixXd y) {
  if (y.rows() != L_ || y.cols() != N_)
    throw std::invalid_argument("replacement data must keep the chain shape");
  y_ = std::move(y);
  recompute_residual();
}

Eigen::VectorXd GibbsChain::residual_with_atom(int i, int k) const {
  double w = z(k, i) ? s(k, i) : 0.0;
  return resid_.col(i) + phi.col(k) * w;
}

PhiParams GibbsChain::phi_conditional(int k) const {
  double data_scalar = 0.0;
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(L_);
  for (int i = 0; i < N_; ++i) {
    if (!z(k, i)) continue;
    double w = s(k, i);
    data_scalar += w * w;
    weighted.noalias() += w * residual_with_atom(i, k);
  }
  PhiParams p;
  p.precision = eta[k] * kernel_.r_inv();
  p.precision.diagonal().array() += lambda_eps * data_scalar;
  Eigen::VectorXd rhs =
      lambda_eps * weighted + eta[k] * (kernel_.r_inv() * mu0_.col(k));
  Eigen::LLT<Eigen::MatrixXd> llt(p.precision);
  if (llt.info() != Eigen::Success) {
    Eigen::MatrixXd jittered = p.precision;
    jittered.diagonal().array() += 1e-10;
    llt.compute(jittered);
    if (llt.info() != Eigen::Success)
      throw numeric_error("phi conditional precision not positive definite");
    p.precision = jittered;
  }
  p.mean = llt.solve(rhs);
  return p;
}

Eigen::VectorXd GibbsChain::draw_phi(int k, Rng& rng) const {
  PhiParams p = phi_conditional(k);
  Eigen::LLT<Eigen::MatrixXd> llt(p.precision);
  Eigen::VectorXd white(L_);
  for (int a = 0; a < L_; ++a) white[a] = rng.normal();
  // precision = L L^T  =>  cov = L^{-T} L^{-1}; mean + L^{-T} white has it
  return p.mean + llt.matrixU().solve(white);
}

GammaParams GibbsChain::eta_conditional(int k) const {
  Eigen::VectorXd dev = phi.col(k) - mu0_.col(k);
  const Eigen::MatrixXd& q = cfg_.eta_quadratic == EtaQuadratic::PrecisionConsistent
                                 ? kernel_.r_inv()
                                 : kernel_.r();
  GammaParams g;
  g.shape = cfg_.a_o + 0.5 * L_;
  g.rate = cfg_.b_o + 0.5 * dev.dot(q * dev);
  return g;
}

double GibbsChain::draw_eta(int k, Rng& rng) const {
  GammaParams g = eta_conditional(k);
  return rng.gamma(g.shape, g.rate);
}

double GibbsChain::z_probability(int i, int k) const {
  double w = s(k, i);
  Eigen::VectorXd target = residual_with_atom(i, k);
  double log_xi = -0.5 * lambda_eps *
                  (phi.col(k).squaredNorm() * w * w - 2.0 * w * target.dot(phi.col(k)));
  log_xi = std::clamp(log_xi, -700.0, 700.0);
  double xi = std::exp(log_xi);
  double p = pi[k] * xi / (1.0 - pi[k] + xi * pi[k]);
  return std::clamp(p, 0.0, 1.0);
}

int GibbsChain::draw_z(int i, int k, Rng& rng) const {
  return rng.bernoulli(z_probability(i, k)) ? 1 : 0;
}

NormalParams GibbsChain::s_conditional(int i, int k) const {
  const double prior_prec = s_prior_precision();
  const double zd = z(k, i) ? 1.0 : 0.0;
  NormalParams n;
  n.precision = prior_prec + lambda_eps * zd * phi.col(k).squaredNorm();
  Eigen::VectorXd target = residual_with_atom(i, k);
  n.mean = (lambda_eps * zd * phi.col(k).dot(target) + prior_prec * mu_s0_(k, i)) /
           n.precision;
  return n;
}

double GibbsChain::draw_s(int i, int k, Rng& rng) const {
  NormalParams n = s_conditional(i, k);
  return rng.normal(n.mean, 1.0 / std::sqrt(n.precision));
}

BetaParams GibbsChain::pi_conditional(int k) const {
  double active = 0.0;
  for (int i = 0; i < N_; ++i) active += z(k, i);
  const double q = static_cast<double>(K_);
  BetaParams b;
  b.a = cfg_.c_o / q + active;
  b.b = cfg_.d_o * (q - 1.0) / q + N_ - active;
  return b;
}

double GibbsChain::draw_pi(int k, Rng& rng) const {
  BetaParams b = pi_conditional(k);
  return rng.beta(b.a, b.b);
}

GammaParams GibbsChain::lambda_s_conditional() const {
  GammaParams g;
  g.shape = 0.5 * N_ * K_ + cfg_.e_o;
  g.rate = cfg_.f_o + 0.5 * (s - mu_s0_).squaredNorm();
  return g;
}

double GibbsChain::draw_lambda_s(Rng& rng) const {
  GammaParams g = lambda_s_conditional();
  return rng.gamma(g.shape, g.rate);
}

GammaParams GibbsChain::lambda_eps_conditional() const {
  GammaParams g;
  g.shape = 0.5 * N_ * L_ + cfg_.g_o;
  g.rate = cfg_.h_o + 0.5 * resid_.squaredNorm();
  return g;
}

double GibbsChain::draw_lambda_eps(Rng& rng) const {
  GammaParams g = lambda_eps_conditional();
  return rng.gamma(g.shape, g.rate);
}

void GibbsChain::sweep(Rng& rng) {
  // Drift from the incremental residual updates is flushed once per sweep.
  recompute_residual();

  for (int k = 0; k < K_; ++k) {
    Eigen::VectorXd updated = draw_phi(k, rng);
    Eigen::VectorXd diff = phi.col(k) - updated;
    for (int i = 0; i < N_; ++i)
      if (z(k, i)) resid_.col(i).noalias() += diff * s(k, i);
    phi.col(k) = updated;
  }

  for (int k = 0; k < K_; ++k) eta[k] = draw_eta(k, rng);

  for (int i = 0; i < N_; ++i) {
    for (int k = 0; k < K_; ++k) {
      double old_w = z(k, i) ? s(k, i) : 0.0;
      z(k, i) = static_cast<std::uint8_t>(draw_z(i, k, rng));
      double mid_w = z(k, i) ? s(k, i) : 0.0;
      if (mid_w != old_w) resid_.col(i).noalias() += phi.col(k) * (old_w - mid_w);

      double new_s = draw_s(i, k, rng);
      double new_w = z(k, i) ? new_s : 0.0;
      if (new_w != mid_w) resid_.col(i).noalias() += phi.col(k) * (mid_w - new_w);
      s(k, i) = new_s;
    }
  }

  for (int k = 0; k < K_; ++k) pi[k] = draw_pi(k, rng);
  lambda_s = draw_lambda_s(rng);
  lambda_eps = draw_lambda_eps(rng);
}

PosteriorSummary run_gibbs(const Eigen::MatrixXd& y,
                           const PriorFactorization& priors,
                           const RunConfig& cfg,
                           const std::vector<double>& wavelengths, Rng& rng) {
  KernelMatrix kernel(static_cast<int>(y.rows()), cfg.ell, cfg.kernel_distance,
                      wavelengths);
  GibbsChain chain(y, priors, kernel, cfg);

  const int K = chain.atom_count();
  const int L = chain.band_count();
  PosteriorSummary summary;
  summary.phi_mean = Eigen::MatrixXd::Zero(L, K);
  summary.usage = Eigen::VectorXd::Zero(K);

  int kept = 0;
  for (int iter = 0; iter < cfg.gibbs_iters; ++iter) {
    chain.sweep(rng);
    if (!chain.phi.allFinite() || !chain.s.allFinite() || !chain.pi.allFinite() ||
        !chain.eta.allFinite() || !std::isfinite(chain.lambda_s) ||
        !std::isfinite(chain.lambda_eps))
      throw numeric_error("non-finite sample at Gibbs iteration " +
                          std::to_string(iter));
    if (iter >= cfg.burn_in) {
      summary.phi_mean += chain.phi;
      summary.usage += chain.pi;
      ++kept;
    }
  }
  if (kept == 0) throw numeric_error("no post-burn-in Gibbs samples");
  summary.phi_mean /= kept;
  summary.usage /= kept;
  summary.lambda_eps_final = chain.lambda_eps;
  summary.lambda_s_final = chain.lambda_s;
  return summary;
}

}  // namespace hsrec
