#include "hsrec/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>

#include "hsrec/coder.hpp"
#include "hsrec/gpmodel.hpp"
#include "hsrec/preprocess.hpp"
#include "hsrec/rng.hpp"

namespace hsrec {

namespace {

// distinct RNG streams per role and cluster
constexpr std::uint64_t kStreamSubsample = 0x100000;
constexpr std::uint64_t kStreamPriors = 0x200000;
constexpr std::uint64_t kStreamChain = 0x300000;

Eigen::VectorXd rgb_patch_vector(const HyperCube& rgb, int r0, int c0, int p) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(p) * p * 3);
  Eigen::Index at = 0;
  for (int dr = 0; dr < p; ++dr)
    for (int dc = 0; dc < p; ++dc)
      for (int b = 0; b < 3; ++b) v[at++] = rgb.at(r0 + dr, c0 + dc, b);
  return v;
}

Eigen::Vector3d rgb_pixel(const HyperCube& rgb, int r, int c) {
  return Eigen::Vector3d(rgb.at(r, c, 0), rgb.at(r, c, 1), rgb.at(r, c, 2));
}

std::vector<double> rgb_grid() { return {1.0, 2.0, 3.0}; }

}  // namespace

std::vector<int> patch_origins(int extent, int p, int stride) {
  if (p > extent) throw std::invalid_argument("patch side exceeds image extent");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  std::vector<int> origins;
  for (int r = 0; r + p <= extent; r += stride) origins.push_back(r);
  if (origins.empty() || origins.back() != extent - p)
    origins.push_back(extent - p);
  return origins;
}

TrainedModel train(const std::vector<HyperCube>& cubes,
                   const SpectralTransform& t, const RunConfig& cfg,
                   TrainInfo* info) {
  const auto t_start = std::chrono::steady_clock::now();
  cfg.validate();
  t.validate();
  if (cubes.empty()) throw std::invalid_argument("training needs at least one cube");
  for (const auto& cube : cubes) {
    cube.validate();
    if (cube.wavelengths != cubes.front().wavelengths)
      throw std::invalid_argument("training cubes must share one wavelength grid");
    if (cube.bands != t.bands())
      throw std::invalid_argument("cube bands must match transform columns");
  }

  const int p = cfg.patch;
  PatchSet set = extract_patches(cubes[0], p, p, 0);
  for (std::size_t i = 1; i < cubes.size(); ++i)
    append_patches(set, cubes[i], p, static_cast<int>(i));

  const int C = cfg.clusters;
  if (static_cast<std::size_t>(C) > set.size())
    throw std::invalid_argument("fewer training patches than clusters");

  Clustering clustering =
      kmeans(set, C, cfg.seed, cfg.kmeans_iters, cfg.kmeans_tol, cfg.kmeans_center);
  std::vector<int> budgets = atom_budget(clustering.cluster_sizes(), cfg.k_total);
  Eigen::MatrixXd centroids = rgb_centroids(clustering, set, t);

  TrainedModel model;
  model.config = cfg;
  model.transform = t;
  model.wavelengths = cubes[0].wavelengths;
  model.clusters.resize(C);
  if (info) {
    info->atoms = budgets;
    info->lambda_eps.assign(C, 0.0);
    info->pixels.assign(C, 0);
  }

  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < C; ++c) {
    try {
      std::vector<int> members = clustering.members(c);
      std::uint64_t sub_seed = Rng::stream(cfg.seed, kStreamSubsample + c).raw();
      Eigen::MatrixXd pixels =
          subsample_pixels(set, members, cfg.pixel_fraction, sub_seed);
      if (pixels.cols() < budgets[c]) {
#pragma omp critical(hsrec_log)
        std::cerr << "warning: cluster " << c << " has " << pixels.cols()
                  << " subsampled pixels for " << budgets[c]
                  << " atoms; using all pixels\n";
        pixels = subsample_pixels(set, members, 1.0, sub_seed);
      }

      std::uint64_t prior_seed = Rng::stream(cfg.seed, kStreamPriors + c).raw();
      PriorFactorization priors =
          factorize(pixels, budgets[c], cfg.delta, prior_seed, cfg.dict_epochs);

      ClusterModel& cm = model.clusters[c];
      if (cfg.dl_variant) {
        cm.phi = priors.d;
        cm.usage = Eigen::VectorXd::Zero(budgets[c]);
        for (int k = 0; k < budgets[c]; ++k)
          cm.usage[k] =
              (priors.a.row(k).array() > 0.0).cast<double>().sum() / priors.a.cols();
      } else {
        Rng chain_rng = Rng::stream(cfg.seed, kStreamChain + c);
        PosteriorSummary summary =
            run_gibbs(pixels, priors, cfg, model.wavelengths, chain_rng);
        cm.phi = summary.phi_mean;
        cm.usage = summary.usage;
        if (info) info->lambda_eps[c] = summary.lambda_eps_final;
      }
      if (info) info->pixels[c] = static_cast<int>(pixels.cols());
      cm.phi_rgb = t.m * cm.phi;
      cm.centroid = centroids.col(c);
    } catch (const std::exception& e) {
#pragma omp critical(hsrec_fail)
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw numeric_error("training failed: " + failure);

  model.validate();
  if (info)
    info->seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
  return model;
}

namespace {

struct PatchGrid {
  std::vector<int> row_origins;
  std::vector<int> col_origins;
  std::vector<int> cluster_of_patch;  // row-major over (row_origin, col_origin)

  int patch_index(int ri, int ci) const {
    return ri * static_cast<int>(col_origins.size()) + ci;
  }
};

PatchGrid build_grid(const TrainedModel& model, const HyperCube& rgb, int stride) {
  const int p = model.config.patch;
  PatchGrid grid;
  grid.row_origins = patch_origins(rgb.rows, p, stride);
  grid.col_origins = patch_origins(rgb.cols, p, stride);

  Eigen::MatrixXd centroids(model.clusters[0].centroid.size(),
                            model.cluster_count());
  for (int c = 0; c < model.cluster_count(); ++c)
    centroids.col(c) = model.clusters[c].centroid;

  const int nr = static_cast<int>(grid.row_origins.size());
  const int nc = static_cast<int>(grid.col_origins.size());
  grid.cluster_of_patch.assign(static_cast<std::size_t>(nr) * nc, 0);
#pragma omp parallel for schedule(static)
  for (int ri = 0; ri < nr; ++ri)
    for (int ci = 0; ci < nc; ++ci) {
      Eigen::VectorXd v =
          rgb_patch_vector(rgb, grid.row_origins[ri], grid.col_origins[ci], p);
      grid.cluster_of_patch[grid.patch_index(ri, ci)] = assign_cluster(v, centroids);
    }
  return grid;
}

void check_reconstruct_inputs(const TrainedModel& model, const HyperCube& rgb,
                              int stride) {
  model.validate();
  rgb.validate();
  if (rgb.bands != 3)
    throw std::invalid_argument("reconstruction input must have 3 bands");
  if (stride < 1 || stride > model.config.patch)
    throw std::invalid_argument("stride must lie in [1, patch]");
}

// covering origins of x, ascending, from an ascending origin list
void covering_origins(const std::vector<int>& origins, int p, int x,
                      std::vector<int>* out) {
  out->clear();
  for (std::size_t j = 0; j < origins.size(); ++j)
    if (origins[j] <= x && x < origins[j] + p)
      out->push_back(static_cast<int>(j));
}

double negative_fraction_of(const HyperCube& cube) {
  std::size_t neg = 0;
  for (double v : cube.data)
    if (v < 0.0) ++neg;
  return static_cast<double>(neg) / static_cast<double>(cube.data.size());
}

}  // namespace

HyperCube reconstruct(const TrainedModel& model, const HyperCube& rgb,
                      int stride, ReconstructStats* stats) {
  check_reconstruct_inputs(model, rgb, stride);
  const int p = model.config.patch;
  const int L = model.bands();
  const double delta1 = model.config.delta1;
  PatchGrid grid = build_grid(model, rgb, stride);

  HyperCube out = HyperCube::zeros(rgb.rows, rgb.cols, model.wavelengths);
  std::vector<std::uint8_t> infeasible(rgb.pixel_count(), 0);

  // Each output pixel is handled by exactly one worker: it enumerates the
  // patches covering it in the same row-major order the serial reference
  // visits them, so sums are bitwise identical for any thread count.
#pragma omp parallel
  {
    std::vector<int> rows, cols;
    std::vector<std::optional<std::pair<Eigen::VectorXd, bool>>> cache(
        model.cluster_count());
#pragma omp for schedule(static) collapse(2)
    for (int r = 0; r < rgb.rows; ++r)
      for (int c = 0; c < rgb.cols; ++c) {
        covering_origins(grid.row_origins, p, r, &rows);
        covering_origins(grid.col_origins, p, c, &cols);
        std::fill(cache.begin(), cache.end(), std::nullopt);
        Eigen::Vector3d y = rgb_pixel(rgb, r, c);
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(L);
        int count = 0;
        bool bad = false;
        for (int ri : rows)
          for (int ci : cols) {
            int cl = grid.cluster_of_patch[grid.patch_index(ri, ci)];
            if (!cache[cl]) {
              SparseCode code = code_min_l1(y, model.clusters[cl].phi_rgb, delta1);
              cache[cl] = std::make_pair(
                  Eigen::VectorXd(model.clusters[cl].phi *
                                  code.dense(model.clusters[cl].atoms())),
                  code.infeasible);
            }
            sum += cache[cl]->first;
            bad = bad || cache[cl]->second;
            ++count;
          }
        std::size_t px = static_cast<std::size_t>(r) * rgb.cols + c;
        infeasible[px] = bad ? 1 : 0;
        for (int b = 0; b < L; ++b) out.at(r, c, b) = sum[b] / count;
      }
  }

  if (stats) {
    stats->infeasible_pixels = 0;
    for (std::uint8_t f : infeasible) stats->infeasible_pixels += f;
    stats->negative_fraction = negative_fraction_of(out);
  }
  return out;
}

HyperCube reconstruct_reference(const TrainedModel& model, const HyperCube& rgb,
                                int stride, ReconstructStats* stats) {
  check_reconstruct_inputs(model, rgb, stride);
  const int p = model.config.patch;
  const int L = model.bands();
  const double delta1 = model.config.delta1;

  Eigen::MatrixXd centroids(model.clusters[0].centroid.size(),
                            model.cluster_count());
  for (int c = 0; c < model.cluster_count(); ++c)
    centroids.col(c) = model.clusters[c].centroid;

  std::vector<int> row_origins = patch_origins(rgb.rows, p, stride);
  std::vector<int> col_origins = patch_origins(rgb.cols, p, stride);

  std::vector<Eigen::VectorXd> sums(rgb.pixel_count(),
                                    Eigen::VectorXd::Zero(L));
  std::vector<int> counts(rgb.pixel_count(), 0);
  std::vector<std::uint8_t> infeasible(rgb.pixel_count(), 0);

  for (int r0 : row_origins)
    for (int c0 : col_origins) {
      Eigen::VectorXd v = rgb_patch_vector(rgb, r0, c0, p);
      int cl = assign_cluster(v, centroids);
      const ClusterModel& cm = model.clusters[cl];
      for (int dr = 0; dr < p; ++dr)
        for (int dc = 0; dc < p; ++dc) {
          Eigen::Vector3d y = rgb_pixel(rgb, r0 + dr, c0 + dc);
          SparseCode code = code_min_l1(y, cm.phi_rgb, delta1);
          std::size_t px =
              static_cast<std::size_t>(r0 + dr) * rgb.cols + (c0 + dc);
          sums[px] += cm.phi * code.dense(cm.atoms());
          ++counts[px];
          if (code.infeasible) infeasible[px] = 1;
        }
    }

  HyperCube out = HyperCube::zeros(rgb.rows, rgb.cols, model.wavelengths);
  for (int r = 0; r < rgb.rows; ++r)
    for (int c = 0; c < rgb.cols; ++c) {
      std::size_t px = static_cast<std::size_t>(r) * rgb.cols + c;
      for (int b = 0; b < L; ++b) out.at(r, c, b) = sums[px][b] / counts[px];
    }

  if (stats) {
    stats->infeasible_pixels = 0;
    for (std::uint8_t f : infeasible) stats->infeasible_pixels += f;
    stats->negative_fraction = negative_fraction_of(out);
  }
  return out;
}

HyperCube simulate_rgb(const HyperCube& cube, const SpectralTransform& t) {
  cube.validate();
  t.validate();
  if (cube.bands != t.bands())
    throw std::invalid_argument("cube bands must match transform columns");
  if (t.channels() != 3)
    throw std::invalid_argument("RGB simulation needs a 3-row transform");

  HyperCube out = HyperCube::zeros(cube.rows, cube.cols, rgb_grid());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < cube.rows; ++r)
    for (int c = 0; c < cube.cols; ++c) {
      Eigen::Map<const Eigen::VectorXd> s(
          cube.data.data() +
              (static_cast<std::size_t>(r) * cube.cols + c) * cube.bands,
          cube.bands);
      Eigen::Vector3d y = t.m * s;
      for (int b = 0; b < 3; ++b) out.at(r, c, b) = y[b];
    }
  return out;
}

SpectralTransform estimate_transform(const Eigen::MatrixXd& rgb,
                                     const Eigen::MatrixXd& hs) {
  if (rgb.cols() != hs.cols())
    throw std::invalid_argument("paired pixel matrices must have equal columns");
  if (rgb.cols() < 1) throw std::invalid_argument("need at least one pixel pair");
  if (!rgb.allFinite() || !hs.allFinite())
    throw std::invalid_argument("pixel matrices must be finite");

  // minimal-norm least-squares solution of  hs^T X = rgb^T
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(hs.transpose());
  SpectralTransform t;
  t.m = cod.solve(rgb.transpose()).transpose();
  t.validate();
  return t;
}

}  // namespace hsrec
