// Timings of the OpenMP kernels against their serial references on a
// synthetic scene. Also checks that parallel and serial outputs agree
// bit for bit, which is the contract the test suite enforces.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <iostream>

#include "hsrec/pipeline.hpp"
#include "hsrec/preprocess.hpp"
#include "hsrec/synth.hpp"

using namespace hsrec;

namespace {

double seconds_of(const std::function<void()>& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  int size = argc > 1 ? std::atoi(argv[1]) : 64;
  int max_threads = omp_get_max_threads();

  SynthSpec spec;
  spec.rows = size;
  spec.cols = size;
  spec.seed = 7;
  SynthData data = generate(spec);

  RunConfig cfg;
  cfg.clusters = 2;
  cfg.k_total = 16;
  cfg.gibbs_iters = 40;
  cfg.burn_in = 20;
  cfg.pixel_fraction = 0.25;
  cfg.seed = 7;

  SpectralTransform t;
  t.m = Eigen::MatrixXd::Zero(3, spec.bands);
  for (int ch = 0; ch < 3; ++ch)
    for (int b = 0; b < spec.bands; ++b) {
      double d = (b - (5.0 + 10.0 * ch)) / 5.0;
      t.m(ch, b) = std::exp(-0.5 * d * d) + 0.02;
    }

  std::printf("scene %dx%dx%d, %d hardware threads\n", spec.rows, spec.cols,
              spec.bands, max_threads);

  TrainedModel model = train({data.cube}, t, cfg);
  HyperCube rgb = simulate_rgb(data.cube, t);

  HyperCube ref, par1, parN;
  double t_ref = seconds_of([&] { ref = reconstruct_reference(model, rgb, 2); });
  omp_set_num_threads(1);
  double t_par1 = seconds_of([&] { par1 = reconstruct(model, rgb, 2); });
  omp_set_num_threads(max_threads);
  double t_parN = seconds_of([&] { parN = reconstruct(model, rgb, 2); });

  bool same1 = std::memcmp(ref.data.data(), par1.data.data(),
                           ref.data.size() * sizeof(double)) == 0;
  bool sameN = std::memcmp(ref.data.data(), parN.data.data(),
                           ref.data.size() * sizeof(double)) == 0;

  std::printf("%-34s %10.3fs\n", "reconstruct serial reference", t_ref);
  std::printf("%-34s %10.3fs  bitwise=%s\n", "reconstruct omp (1 thread)", t_par1,
              same1 ? "match" : "MISMATCH");
  std::printf("%-34s %10.3fs  bitwise=%s  speedup=%.2fx\n",
              "reconstruct omp (all threads)", t_parN, sameN ? "match" : "MISMATCH",
              t_ref / t_parN);

  PatchSet set = extract_patches(data.cube, 8, 8);
  omp_set_num_threads(1);
  double t_km1 =
      seconds_of([&] { (void)kmeans(set, 4, 7, 50, 1e-6, false); });
  omp_set_num_threads(max_threads);
  double t_kmN =
      seconds_of([&] { (void)kmeans(set, 4, 7, 50, 1e-6, false); });
  std::printf("%-34s %10.3fs\n", "kmeans (1 thread)", t_km1);
  std::printf("%-34s %10.3fs  speedup=%.2fx\n", "kmeans (all threads)", t_kmN,
              t_km1 / t_kmN);

  return (same1 && sameN) ? 0 : 1;
}
