// hsrec: hyperspectral recovery from RGB images.
//
// Subcommands: train, reconstruct, rgbsim, evaluate, estimate-transform,
// synth. Exit codes: 0 success, 1 usage, 2 I/O or format, 3 numerical.

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hsrec/coder.hpp"
#include "hsrec/config.hpp"
#include "hsrec/core.hpp"
#include "hsrec/cubeio.hpp"
#include "hsrec/metrics.hpp"
#include "hsrec/pipeline.hpp"
#include "hsrec/rng.hpp"
#include "hsrec/synth.hpp"

namespace {

using namespace hsrec;

// Binds every RunConfig field as a flag with the same name. CLI11 only
// writes a bound variable when the flag is present, so values loaded from
// --config files survive unless explicitly overridden.
void add_config_options(CLI::App* app, RunConfig& cfg, std::string& kernel_distance,
                        std::string& eta_quadratic, std::string& s_prior_precision) {
  app->add_option("--a_o", cfg.a_o);
  app->add_option("--b_o", cfg.b_o);
  app->add_option("--c_o", cfg.c_o);
  app->add_option("--d_o", cfg.d_o);
  app->add_option("--e_o", cfg.e_o);
  app->add_option("--f_o", cfg.f_o);
  app->add_option("--g_o", cfg.g_o);
  app->add_option("--h_o", cfg.h_o);
  app->add_option("--lambda_eps_o", cfg.lambda_eps_o);
  app->add_option("--lambda_s_o", cfg.lambda_s_o);
  app->add_option("--ell", cfg.ell);
  app->add_option("--kernel_distance", kernel_distance)
      ->check(CLI::IsMember({"channel-index", "nanometers"}));
  app->add_option("--gibbs_iters", cfg.gibbs_iters);
  app->add_option("--burn_in", cfg.burn_in);
  app->add_option("--eta_quadratic", eta_quadratic)
      ->check(CLI::IsMember({"precision-consistent", "paper-literal"}));
  app->add_option("--s_prior_precision", s_prior_precision)
      ->check(CLI::IsMember({"sampled", "fixed"}));
  app->add_option("--clusters", cfg.clusters);
  app->add_option("--patch", cfg.patch);
  app->add_option("--k_total", cfg.k_total);
  app->add_option("--pixel_fraction", cfg.pixel_fraction);
  app->add_option("--stride", cfg.stride);
  app->add_option("--kmeans_iters", cfg.kmeans_iters);
  app->add_option("--kmeans_tol", cfg.kmeans_tol);
  app->add_flag("--kmeans_center", cfg.kmeans_center);
  app->add_option("--delta", cfg.delta);
  app->add_option("--delta1", cfg.delta1);
  app->add_option("--dict_epochs", cfg.dict_epochs);
  app->add_flag("--dl_variant", cfg.dl_variant);
  app->add_option("--seed", cfg.seed);
  app->add_option("--threads", cfg.threads);
}

void finish_config(RunConfig& cfg, const std::string& kernel_distance,
                   const std::string& eta_quadratic,
                   const std::string& s_prior_precision) {
  if (!kernel_distance.empty())
    cfg.apply_line("kernel_distance=" + kernel_distance);
  if (!eta_quadratic.empty()) cfg.apply_line("eta_quadratic=" + eta_quadratic);
  if (!s_prior_precision.empty())
    cfg.apply_line("s_prior_precision=" + s_prior_precision);
  cfg.validate();
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
}

// applies --config <file> before CLI11 sees the flags, so flags win
void preload_config(int argc, char** argv, RunConfig& cfg) {
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") cfg.apply_file(argv[i + 1]);
}

int cmd_train(const std::vector<std::string>& cube_paths,
              const std::string& response_path, const std::string& out_path,
              bool normalize_response, const RunConfig& cfg) {
  cubeio::Response resp = cubeio::read_response(response_path, normalize_response);
  std::vector<HyperCube> cubes;
  cubes.reserve(cube_paths.size());
  for (const auto& p : cube_paths) cubes.push_back(cubeio::read_cube(p));

  TrainInfo info;
  TrainedModel model = train(cubes, resp.transform, cfg, &info);
  cubeio::save_model(model, out_path);

  for (std::size_t c = 0; c < info.atoms.size(); ++c) {
    std::cout << "cluster " << c << ": K=" << info.atoms[c]
              << " pixels=" << info.pixels[c];
    if (!cfg.dl_variant) std::cout << " lambda_eps=" << info.lambda_eps[c];
    std::cout << "\n";
  }
  std::cout << "train_seconds=" << info.seconds << "\n";
  std::cout << "model written to " << out_path << "\n";
  return 0;
}

int cmd_reconstruct(const std::string& model_path, const std::string& rgb_path,
                    const std::string& out_path, int stride, int threads,
                    const std::string& report_path) {
  TrainedModel model = cubeio::load_model(model_path);
  HyperCube rgb = cubeio::read_cube(rgb_path);
  if (stride < 1 || stride > model.config.patch)
    throw std::invalid_argument("stride must lie in [1, patch]");
  if (threads > 0) omp_set_num_threads(threads);

  ReconstructStats stats;
  HyperCube out = reconstruct(model, rgb, stride, &stats);
  cubeio::write_cube(out, out_path);
  std::cout << "infeasible_pixels=" << stats.infeasible_pixels << "\n";
  std::cout << "negative_fraction=" << stats.negative_fraction << "\n";
  std::cout << "cube written to " << out_path << "\n";
  if (!report_path.empty()) {
    std::ofstream rep(report_path, std::ios::trunc);
    if (!rep) throw io_error("cannot open report file: " + report_path);
    rep << "infeasible_pixels=" << stats.infeasible_pixels << "\n";
    rep << "negative_fraction=" << stats.negative_fraction << "\n";
  }
  return 0;
}

int cmd_rgbsim(const std::string& cube_path, const std::string& response_path,
               const std::string& out_path, bool normalize_response) {
  HyperCube cube = cubeio::read_cube(cube_path);
  cubeio::Response resp = cubeio::read_response(response_path, normalize_response);
  HyperCube rgb = simulate_rgb(cube, resp.transform);
  cubeio::write_cube(rgb, out_path);
  std::cout << "cube written to " << out_path << "\n";
  return 0;
}

int cmd_evaluate(const std::string& est_path, const std::string& gt_path,
                 const std::string& out_path, const RunConfig& cfg) {
  HyperCube est = cubeio::read_cube(est_path);
  HyperCube gt = cubeio::read_cube(gt_path);
  ReconstructionReport report = make_report(est, gt, cfg);
  write_report(report, std::cout);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw io_error("cannot open report file: " + out_path);
    write_report(report, out);
  }
  return 0;
}

int cmd_estimate_transform(const std::string& rgb_path, const std::string& hs_path,
                           const std::string& out_path,
                           const std::string& ref_path) {
  HyperCube rgb = cubeio::read_cube(rgb_path);
  HyperCube hs = cubeio::read_cube(hs_path);
  if (rgb.bands != 3) throw std::invalid_argument("--rgb cube must have 3 bands");
  if (rgb.rows != hs.rows || rgb.cols != hs.cols)
    throw std::invalid_argument("paired cubes must have equal spatial dimensions");

  Eigen::MatrixXd y(3, rgb.pixel_count());
  Eigen::MatrixXd yh(hs.bands, hs.pixel_count());
  for (std::size_t px = 0; px < rgb.pixel_count(); ++px) {
    for (int b = 0; b < 3; ++b) y(b, px) = rgb.data[px * 3 + b];
    for (int b = 0; b < hs.bands; ++b) yh(b, px) = hs.data[px * hs.bands + b];
  }
  SpectralTransform t = estimate_transform(y, yh);
  cubeio::write_response(out_path, t, hs.wavelengths);
  std::cout << "response written to " << out_path << "\n";

  if (!ref_path.empty()) {
    cubeio::Response ref = cubeio::read_response(ref_path);
    if (ref.transform.bands() != t.bands())
      throw std::invalid_argument("reference response has different band count");
    double err = (ref.transform.m - t.m).cwiseAbs().maxCoeff();
    std::cout << "max_abs_error_vs_ref=" << err << "\n";
  }
  return 0;
}

int cmd_synth(const SynthSpec& spec, const std::string& out_path,
              const std::string& truth_path, const std::string& response_path) {
  SynthData data = generate(spec);
  cubeio::write_cube(data.cube, out_path);
  std::cout << "cube written to " << out_path << "\n";
  if (!truth_path.empty()) {
    write_truth(data, truth_path);
    std::cout << "truth written to " << truth_path << "\n";
  }
  if (!response_path.empty()) {
    // smooth random 3 x L response for simulation experiments
    Rng rng = Rng::stream(spec.seed, 0x72657370ull);
    Eigen::MatrixXd m(3, spec.bands);
    for (int ch = 0; ch < 3; ++ch) {
      double center = (0.5 + 2.0 * ch) / 6.0 * (spec.bands - 1) +
                      rng.uniform() * spec.bands / 6.0;
      double width = spec.bands / 6.0 + rng.uniform() * spec.bands / 6.0;
      for (int b = 0; b < spec.bands; ++b) {
        double d = (b - center) / width;
        m(ch, b) = std::exp(-0.5 * d * d) + 0.02;
      }
    }
    SpectralTransform t;
    t.m = m;
    cubeio::write_response(response_path, t, data.cube.wavelengths);
    std::cout << "response written to " << response_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperspectral recovery from RGB images"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string kernel_distance, eta_quadratic, s_prior_precision;
  std::string config_path;

  // train
  auto* train_cmd = app.add_subcommand("train", "infer per-cluster GP sets");
  std::vector<std::string> cube_paths;
  std::string response_path, out_path;
  bool normalize_response = false;
  train_cmd->add_option("--cubes", cube_paths, "training cube paths")
      ->required()
      ->delimiter(',');
  train_cmd->add_option("--response", response_path, "spectral response table")
      ->required();
  train_cmd->add_option("--out", out_path, "output model path")->required();
  train_cmd->add_flag("--normalize-response", normalize_response);
  train_cmd->add_option("--config", config_path, "key=value config file");
  add_config_options(train_cmd, cfg, kernel_distance, eta_quadratic,
                     s_prior_precision);

  // reconstruct
  auto* rec_cmd = app.add_subcommand("reconstruct", "recover a cube from RGB");
  std::string model_path, rgb_path, rec_out, report_path;
  int rec_stride = 2;
  int rec_threads = 0;
  rec_cmd->add_option("--model", model_path)->required();
  rec_cmd->add_option("--rgb", rgb_path)->required();
  rec_cmd->add_option("--out", rec_out)->required();
  rec_cmd->add_option("--stride", rec_stride);
  rec_cmd->add_option("--threads", rec_threads);
  rec_cmd->add_option("--report", report_path);

  // rgbsim
  auto* sim_cmd = app.add_subcommand("rgbsim", "transform a cube to RGB");
  std::string sim_cube, sim_resp, sim_out;
  bool sim_norm = false;
  sim_cmd->add_option("--cube", sim_cube)->required();
  sim_cmd->add_option("--response", sim_resp)->required();
  sim_cmd->add_option("--out", sim_out)->required();
  sim_cmd->add_flag("--normalize-response", sim_norm);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "report metrics est vs gt");
  std::string eval_est, eval_gt, eval_out;
  eval_cmd->add_option("--est", eval_est)->required();
  eval_cmd->add_option("--gt", eval_gt)->required();
  eval_cmd->add_option("--out", eval_out);

  // estimate-transform
  auto* est_cmd = app.add_subcommand("estimate-transform",
                                     "least-squares response from paired cubes");
  std::string est_rgb, est_hs, est_out, est_ref;
  est_cmd->add_option("--rgb", est_rgb)->required();
  est_cmd->add_option("--hs", est_hs)->required();
  est_cmd->add_option("--out", est_out)->required();
  est_cmd->add_option("--ref", est_ref);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene");
  SynthSpec spec;
  std::string synth_out, synth_truth, synth_resp;
  synth_cmd->add_option("--out", synth_out)->required();
  synth_cmd->add_option("--truth", synth_truth);
  synth_cmd->add_option("--response", synth_resp,
                        "also write a random smooth 3-channel response");
  synth_cmd->add_option("--rows", spec.rows);
  synth_cmd->add_option("--cols", spec.cols);
  synth_cmd->add_option("--bands", spec.bands);
  synth_cmd->add_option("--k_true", spec.k_true);
  synth_cmd->add_option("--sparsity", spec.sparsity);
  synth_cmd->add_option("--noise_precision", spec.noise_precision);
  synth_cmd->add_option("--block", spec.block);
  synth_cmd->add_option("--seed", spec.seed);

  try {
    try {
      preload_config(argc, argv, cfg);
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      std::cerr << (e.get_exit_code() == 0 ? "" : "usage error: ");
      int rc = app.exit(e);
      return rc == 0 ? 0 : 1;
    }
    finish_config(cfg, kernel_distance, eta_quadratic, s_prior_precision);

    if (train_cmd->parsed())
      return cmd_train(cube_paths, response_path, out_path, normalize_response,
                       cfg);
    if (rec_cmd->parsed())
      return cmd_reconstruct(model_path, rgb_path, rec_out, rec_stride,
                             rec_threads, report_path);
    if (sim_cmd->parsed()) return cmd_rgbsim(sim_cube, sim_resp, sim_out, sim_norm);
    if (eval_cmd->parsed()) return cmd_evaluate(eval_est, eval_gt, eval_out, cfg);
    if (est_cmd->parsed())
      return cmd_estimate_transform(est_rgb, est_hs, est_out, est_ref);
    if (synth_cmd->parsed()) return cmd_synth(spec, synth_out, synth_truth, synth_resp);
    return 1;
  } catch (const io_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const numeric_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
