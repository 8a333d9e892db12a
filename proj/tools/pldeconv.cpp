// Command-line front end. Images are PFM (raw float) or PGM (scaled to [0, 1])
// chosen by file extension; observations are stored in photon counts, clean
// and blur-only images on the [0, 1] scale.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "pldeconv/convolution.hpp"
#include "pldeconv/error.hpp"
#include "pldeconv/estimation.hpp"
#include "pldeconv/io.hpp"
#include "pldeconv/metrics.hpp"
#include "pldeconv/noise.hpp"
#include "pldeconv/synthetic.hpp"

namespace fs = std::filesystem;
using namespace pldeconv;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Bad flag values that CLI11 cannot see (mutually dependent flags etc).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_pgm(const fs::path& p) { return p.extension() == ".pgm"; }

Image read_image(const fs::path& p) { return is_pgm(p) ? io::read_pgm(p) : io::read_pfm(p); }

void write_image(const fs::path& p, const Image& x) {
  if (is_pgm(p)) {
    io::write_pgm(p, x);
  } else {
    io::write_pfm(p, x);
  }
}

Centering centering_from(const std::string& s) {
  return s == "none" ? Centering::None : Centering::Centroid;
}

LossMode loss_from(const std::string& s) {
  return s == "gradient" ? LossMode::GradientDomain : LossMode::Intensity;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw FormatError("cannot open " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

// --- option bundles ------------------------------------------------------------

struct RenderFlags {
  int size = 32;
  int samples = 1024;
  std::string centering = "centroid";

  void add(CLI::App* app) {
    app->add_option("--size", size, "kernel window M")->check(CLI::Range(3, 1 << 12));
    app->add_option("--samples", samples, "trajectory samples S")->check(CLI::Range(2, 1 << 24));
    app->add_option("--centering", centering, "centroid or none")
        ->check(CLI::IsMember({"centroid", "none"}));
  }
  RenderConfig config() const { return {size, samples, centering_from(centering)}; }
};

// --- subcommands ---------------------------------------------------------------

struct Simulate {
  std::string clean, kernel, keypoints, out, out_blur;
  double alpha = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  RenderFlags render;

  void add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("simulate", "y = Poisson(alpha h*x) + N(0, sigma^2)");
    c->add_option("--clean", clean, "clean image on [0, 1]")->required();
    auto* k = c->add_option("--kernel", kernel, "kernel text file");
    auto* z = c->add_option("--keypoints", keypoints, "key points JSON, rendered with --size");
    k->excludes(z);
    c->add_option("--alpha", alpha, "photon level")->required()->check(CLI::PositiveNumber);
    c->add_option("--sigma-read", sigma, "read noise std in counts")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", seed, "noise seed");
    c->add_option("--out", out, "noisy observation (photon counts)")->required();
    c->add_option("--out-blur-only", out_blur, "noiseless h*x on [0, 1]");
    render.add(c);
    c->callback([this] { run(); });
  }

  void run() const {
    if (kernel.empty() == keypoints.empty()) {
      throw UsageError("simulate: give exactly one of --kernel or --keypoints");
    }
    const Image x = read_image(clean);
    const Kernel h = kernel.empty() ? render_kernel(io::read_keypoints_json(keypoints), render.config())
                                    : io::read_kernel_text(kernel);
    const Image blur = convolve(x, h);
    const Image y = poisson_forward(blur, {PhotonLevel(alpha), sigma}, seed);
    write_image(out, y);
    if (!out_blur.empty()) write_image(out_blur, blur);
    std::printf("snr_db=%.4f pixels=%zu\n", snr_db(alpha, sum(blur) / blur.size(), sigma),
                y.size());
  }
};

struct GenKernels {
  int count = 0;
  int k = 4;
  std::uint64_t seed = 0;
  double scale = 0.3;
  std::string out_dir, manifest;
  RenderFlags render;

  void add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("gen-kernels", "random trajectory kernel dataset");
    c->add_option("--count", count, "number of kernels")->check(CLI::PositiveNumber);
    c->add_option("--keypoints", k, "key points per trajectory K")->check(CLI::Range(2, 64));
    c->add_option("--seed", seed, "base seed; record i uses seed + i");
    c->add_option("--scale", scale, "walk scale")->check(CLI::PositiveNumber);
    c->add_option("--manifest", manifest, "regenerate from an existing manifest.json");
    c->add_option("--out-dir", out_dir, "output directory")->required();
    render.add(c);
    c->callback([this] { run(); });
  }

  void run() const {
    io::DatasetManifest m;
    if (!manifest.empty()) {
      m = io::manifest_from_json(read_json(manifest));
    } else {
      if (count < 1) throw UsageError("gen-kernels: --count is required");
      m = {count, k, seed, scale, render.config()};
    }
    const auto samples = generate_kernel_dataset(m.count, m.keypoints, m.render, m.seed, m.scale);
    io::write_kernel_dataset(out_dir, m, samples);
    std::printf("kernels=%d keypoints=%d seed=%llu dir=%s\n", m.count, m.keypoints,
                static_cast<unsigned long long>(m.seed), out_dir.c_str());
  }
};

struct RenderKernelCmd {
  std::string keypoints, out, preview;
  RenderFlags render;

  void add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("render-kernel", "key points -> kernel");
    c->add_option("--keypoints", keypoints, "key points JSON")->required();
    c->add_option("--out", out, "kernel text file")->required();
    c->add_option("--preview", preview, "PGM preview scaled to the peak tap");
    render.add(c);
    c->callback([this] { run(); });
  }

  void run() const {
    const Kernel h = render_kernel(io::read_keypoints_json(keypoints), render.config());
    io::write_kernel_text(out, h);
    if (!preview.empty()) io::write_pgm(preview, h.grid(), max_value(h.grid()));
    std::printf("size=%d peak=%.6f\n", h.size(), max_value(h.grid()));
  }
};

struct Common {
  std::string config;

  // A config that does not parse is a usage problem, not a runtime failure.
  EstimateConfig load() const {
    if (config.empty()) return {};
    try {
      return io::config_from_json(read_json(config));
    } catch (const Error& e) {
      throw UsageError(std::string("--config: ") + e.what());
    }
  }
};

struct InitKernelCmd {
  std::string blur_only, out, out_kernel;
  int k = 4;
  int size = 32;
  Common common;
  CLI::Option* k_opt = nullptr;
  CLI::Option* size_opt = nullptr;

  void add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("init-kernel", "rectilinear initial kernel");
    c->add_option("--blur-only", blur_only, "blur-only image on [0, 1]")->required();
    k_opt = c->add_option("--keypoints-k", k, "key points K")->check(CLI::Range(2, 64));
    size_opt = c->add_option("--size", size, "kernel window M")->check(CLI::Range(3, 1 << 12));
    c->add_option("--config", common.config, "JSON config (init and render sections)");
    c->add_option("--out", out, "key points JSON")->required();
    c->add_option("--out-kernel", out_kernel, "rendered kernel text file");
    c->callback([this] { run(); });
  }

  void run() const {
    EstimateConfig cfg = common.load();
    if (k_opt->count()) cfg.init.keypoints = k;
    if (size_opt->count()) cfg.render.kernel_size = size;
    const InitResult r = init_kernel(read_image(blur_only), cfg.init, cfg.render.kernel_size);
    if (r.degenerate) std::fprintf(stderr, "warning: flat image, returning a delta kernel\n");
    io::write_keypoints_json(out, r.keypoints);
    if (!out_kernel.empty()) io::write_kernel_text(out_kernel, render_kernel(r.keypoints, cfg.render));
    std::printf("theta_deg=%.1f rho=%.4f f_min=%.6g degenerate=%d\n", r.theta_deg, r.rho, r.f_min,
                r.degenerate ? 1 : 0);
  }
};

struct EstimateCmd {
  std::string input, oracle, loss, out_kernel, out_image, out_keypoints, trace;
  double alpha = 0.0;
  int k = 4;
  int size = 32;
  bool skip = false;
  Common common;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* size_opt = nullptr;
  CLI::Option* loss_opt = nullptr;

  void add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("estimate", "blind kernel estimation and deblurring");
    c->add_option("--input", input, "observation in photon counts")->required();
    alpha_opt = c->add_option("--alpha", alpha, "photon level; estimated when omitted")
                    ->check(CLI::PositiveNumber);
    k_opt = c->add_option("--keypoints-k", k, "key points K")->check(CLI::Range(2, 64));
    size_opt = c->add_option("--size", size, "kernel window M")->check(CLI::Range(3, 1 << 12));
    c->add_option("--oracle-blur-only", oracle, "noiseless blur-only image used as G(y)");
    loss_opt = c->add_option("--loss", loss, "intensity or gradient")
                   ->check(CLI::IsMember({"intensity", "gradient"}));
    c->add_flag("--skip-stage1", skip, "run Stage II straight from the rectilinear init");
    c->add_option("--config", common.config, "JSON config bundle; flags take precedence");
    c->add_option("--out-kernel", out_kernel, "estimated kernel text file")->required();
    c->add_option("--out-image", out_image, "deblurred image on [0, 1]")->required();
    c->add_option("--out-keypoints", out_keypoints, "Stage I key points JSON");
    c->add_option("--trace", trace, "loss trace CSV");
    c->callback([this] { run(); });
  }

  void run() const {
    EstimateConfig cfg = common.load();
    if (k_opt->count()) cfg.init.keypoints = k;
    if (size_opt->count()) cfg.render.kernel_size = size;
    if (loss_opt->count()) cfg.stage1.loss_mode = cfg.stage2.loss_mode = loss_from(loss);
    if (skip) cfg.skip_stage1 = true;
    const Image y = read_image(input);
    if (!oracle.empty()) cfg.denoiser = denoisers::Oracle{read_image(oracle)};
    std::optional<PhotonLevel> a;
    if (alpha_opt->count()) a = PhotonLevel(alpha);

    const EstimateResult r = estimate(y, a, cfg);
    if (r.alpha_estimated) std::fprintf(stderr, "estimated alpha=%.6g\n", r.alpha_used.value());
    io::write_kernel_text(out_kernel, r.kernel);
    write_image(out_image, r.image);
    if (!out_keypoints.empty()) io::write_keypoints_json(out_keypoints, r.keypoints);
    if (!trace.empty()) io::write_trace_csv(trace, r.loss_trace_stage1, r.loss_trace_stage2);
    std::fprintf(stderr, "elapsed %.2fs\n", r.seconds);
    const double l1 = r.loss_trace_stage1.empty() ? 0.0 : r.loss_trace_stage1.back().loss;
    std::printf("alpha=%.6g init_theta_deg=%.1f init_rho=%.4f stage1_loss=%.6g stage2_loss=%.6g\n",
                r.alpha_used.value(), r.init.theta_deg, r.init.rho, l1,
                r.loss_trace_stage2.back().loss);
  }
};

struct Deblur {
  std::string input, kernel, out;
  double alpha = 0.0;
  int iterations = 50;
  double tv = 0.0;
  Common common;
  CLI::Option* it_opt = nullptr;
  CLI::Option* tv_opt = nullptr;

  void add(CLI::App& root) {
    CLI::App* c = root.add_subcommand(
        "deblur", "non-blind Richardson-Lucy; plain RL unless --config or --tv-weight say otherwise");
    c->add_option("--input", input, "observation in photon counts")->required();
    c->add_option("--kernel", kernel, "kernel text file")->required();
    c->add_option("--alpha", alpha, "photon level")->required()->check(CLI::PositiveNumber);
    it_opt = c->add_option("--iterations", iterations, "RL iterations")->check(CLI::PositiveNumber);
    tv_opt = c->add_option("--tv-weight", tv, "TV weight in [0, 0.25)")
                 ->check(CLI::Range(0.0, kMaxTvWeight));
    c->add_option("--config", common.config, "JSON config; its solver section is used");
    c->add_option("--out", out, "deblurred image on [0, 1]")->required();
    c->callback([this] { run(); });
  }

  void run() const {
    SolverConfig s = common.config.empty() ? SolverConfig{} : common.load().solver;
    if (it_opt->count()) s.rl_iterations = iterations;
    if (tv_opt->count()) s.tv_weight = tv;
    const Image x = richardson_lucy(read_image(input), io::read_kernel_text(kernel), PhotonLevel(alpha), s);
    write_image(out, x);
    std::printf("iterations=%d tv_weight=%.4g\n", s.rl_iterations, s.tv_weight);
  }
};

struct Metrics {
  std::string reference, test, kernel_ref, kernel_test;
  double peak = 1.0;

  void add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("metrics", "PSNR/SSIM between images, NCC between kernels");
    c->add_option("--reference", reference, "reference image");
    c->add_option("--test", test, "test image");
    c->add_option("--peak", peak, "PSNR peak")->check(CLI::PositiveNumber);
    c->add_option("--kernel-reference", kernel_ref, "reference kernel text file");
    c->add_option("--kernel-test", kernel_test, "test kernel text file");
    c->callback([this] { run(); });
  }

  void run() const {
    const bool images = !reference.empty() || !test.empty();
    const bool kernels = !kernel_ref.empty() || !kernel_test.empty();
    if ((images && (reference.empty() || test.empty())) ||
        (kernels && (kernel_ref.empty() || kernel_test.empty())) || (!images && !kernels)) {
      throw UsageError("metrics: give --reference and --test, or both kernel flags");
    }
    if (images) {
      const Image a = read_image(reference);
      const Image b = read_image(test);
      std::printf("psnr_db=%.3f ssim=%.6f", psnr(a, b, peak), ssim(a, b));
    }
    if (kernels) {
      std::printf("%skernel_ncc=%.6f", images ? " " : "",
                  kernel_ncc(io::read_kernel_text(kernel_ref), io::read_kernel_text(kernel_test)));
    }
    std::printf("\n");
  }
};

struct CalibrateInit {
  int count = 50;
  int size = 64;
  int kernel_size = 32;
  double rho_lo = 5.0;
  double rho_hi = 15.0;
  std::uint64_t seed = 1;
  std::string out;

  void add(CLI::App& root) {
    CLI::App* c = root.add_subcommand("calibrate-init", "fit the init length model on line blurs");
    c->add_option("--count", count, "number of synthetic blurs")->check(CLI::Range(2, 100000));
    c->add_option("--image-size", size, "scene size")->check(CLI::Range(8, 1 << 13));
    c->add_option("--size", kernel_size, "kernel window M")->check(CLI::Range(3, 1 << 12));
    c->add_option("--rho-lo", rho_lo, "shortest line")->check(CLI::NonNegativeNumber);
    c->add_option("--rho-hi", rho_hi, "longest line")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", seed, "seed");
    c->add_option("--out", out, "write {\"init\": {...}} for use with --config");
    c->callback([this] { run(); });
  }

  void run() const {
    if (rho_hi < rho_lo || rho_hi > kernel_size - 2) {
      throw UsageError("calibrate-init: need rho-lo <= rho-hi <= size - 2");
    }
    const auto set = synthetic::calibration_set(count, size, kernel_size, rho_lo, rho_hi, seed);
    const InitConfig c = calibrate_init(set, InitConfig{});
    if (!out.empty()) {
      nlohmann::json j = io::config_to_json(EstimateConfig{});
      nlohmann::json init = j.at("init");
      init["c0"] = c.c0;
      init["c1"] = c.c1;
      init["sigma_b"] = c.sigma_b;
      std::ofstream f(out);
      if (!f) throw FormatError("cannot write " + out);
      f << nlohmann::json{{"init", init}}.dump(2) << '\n';
    }
    std::printf("c0=%.6g c1=%.6g sigma_b=%.6g\n", c.c0, c.c1, c.sigma_b);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured blind deconvolution for photon-limited images"};
  app.require_subcommand(1);
  Simulate simulate;
  GenKernels gen;
  RenderKernelCmd render;
  InitKernelCmd init;
  EstimateCmd est;
  Deblur deblur;
  Metrics metrics;
  CalibrateInit calibrate;
  simulate.add(app);
  gen.add(app);
  render.add(app);
  init.add(app);
  est.add(app);
  deblur.add(app);
  metrics.add(app);
  calibrate.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
