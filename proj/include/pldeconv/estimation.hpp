#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pldeconv/noise.hpp"
#include "pldeconv/solver.hpp"
#include "pldeconv/trajectory.hpp"

namespace pldeconv {

// ---------------------------------------------------------------------------
// Initialization: rectilinear kernel from directional gradient extrema.
// ---------------------------------------------------------------------------

struct InitConfig {
  // Length model rho = c1 * sqrt(c0^2 / f^2 - sigma_b^2); see calibrate_init().
  double c0 = 0.31;
  double c1 = 0.8;
  double sigma_b = 0.764;
  double theta_step = 1.0;  ///< degrees; angles theta_step, 2 theta_step, ..., <= 180
  int keypoints = 4;
};

struct DirectionalMinimum {
  double theta_deg = 0.0;
  double f_min = 0.0;  ///< max |D_theta| at the minimizing angle
};

/// Scans D_theta = D_x cos(theta) - D_y sin(theta) and returns the angle whose
/// largest absolute response is smallest. D_y differences run down the rows,
/// so theta is counter-clockwise from +x in the displayed image, the same
/// convention as KeyPoints.
DirectionalMinimum min_directional_gradient(const Image& blur_only, double theta_step = 1.0);

struct InitResult {
  KeyPoints keypoints;
  double rho = 0.0;
  double theta_deg = 0.0;
  double f_min = 0.0;
  bool degenerate = false;  ///< flat input; keypoints collapse to a delta
};

/// Rectilinear initial kernel for a blur-only image. rho is clamped to
/// [0, kernel_size - 2] so the line always renders inside the window.
InitResult init_kernel(const Image& blur_only, const InitConfig& cfg, int kernel_size);

double predicted_length(const InitConfig& cfg, double f_min);

struct CalibrationSample {
  double f_min;
  double rho_true;
};

/// Least-squares fit of the length model on known rectilinear blurs. The model
/// is linear in (c1 c0)^2 and (c1 sigma_b)^2 through rho^2 = A / f^2 - B, so
/// the fit is closed form; cfg.c1 is kept and c0, sigma_b are solved for.
InitConfig calibrate_init(std::span<const CalibrationSample> samples, InitConfig cfg);

// ---------------------------------------------------------------------------
// Reblurring loss and its derivatives.
// ---------------------------------------------------------------------------

/// Everything the loss needs besides the kernel.
struct Problem {
  Image y;           ///< observation in photon counts
  PhotonLevel alpha;
  Image blur_only;   ///< denoised observation on the [0, 1] scale
  SolverConfig solver;
  RenderConfig render;
};

/// ||blur_only - h * F(y, h)||^2 with F = Richardson-Lucy.
double loss_of_kernel(const Problem& p, const Image& taps, LossMode mode);

/// loss_of_kernel() at the kernel rendered from z. Propagates RenderError.
double loss_of_z(const Problem& p, const KeyPoints& z, LossMode mode);

/// Central finite differences of loss_of_z() over the 2(K-1) latent
/// coordinates. A perturbation that leaves the window falls back to the
/// one-sided difference. Evaluations run in parallel; the result does not
/// depend on the schedule.
std::vector<double> grad_z(const Problem& p, const KeyPoints& z, double eps, LossMode mode);

/// Gradient of ||blur_only - h * xhat||^2 with respect to h for fixed xhat:
/// -2 correlate(residual, xhat). GradientDomain pulls the residual of both
/// difference channels back through the difference operator first.
Image grad_h_fixed_xhat(const Image& blur_only, const Image& taps, const Image& xhat, Boundary b,
                        LossMode mode);

double soft_threshold(double v, double lambda);
/// Elementwise max(|v| - lambda, 0) sign(v).
Image soft_threshold(const Image& v, double lambda);

// ---------------------------------------------------------------------------
// Stages.
// ---------------------------------------------------------------------------

struct StageConfig {
  double step_size = 1e-2;
  int max_iters = 150;
  double min_step = 1e-8;
  LossMode loss_mode = LossMode::Intensity;
};

struct HqsConfig {
  double mu0 = 2.0;
  double gamma = 1e-4;
  double mu_growth = 1.01;
};

/// Coupling weight after k outer iterations: mu0 * mu_growth^k.
double hqs_mu(const HqsConfig& cfg, int k);

struct TraceEntry {
  int iteration = 0;
  double loss = 0.0;
  double step_size = 0.0;
};

struct Stage1Result {
  KeyPoints keypoints;
  std::vector<TraceEntry> trace;  ///< initial loss, then every accepted step
  int iterations = 0;
};

/// Gradient descent in key-point space with permanent step halving: a step
/// that does not lower the loss is rejected, the step size halves for the rest
/// of the run, and the step is retried. Stops after max_iters gradient
/// evaluations or once the step size falls below min_step.
Stage1Result stage1(const Problem& p, const KeyPoints& z0, const StageConfig& cfg,
                    double fd_eps = 1e-3);

struct Stage2Result {
  Kernel kernel;
  std::vector<TraceEntry> trace;  ///< initial objective, then every accepted step
  int iterations = 0;
  double final_mu = 0.0;
};

/// Half-quadratic splitting on the l1-regularized reblurring loss, starting
/// from h0 = v0. Each iteration recomputes xhat = F(y, h), steps h along the
/// fixed-xhat gradient plus mu (h - v), projects h back to a valid kernel,
/// shrinks v = S_{gamma/mu}(h) and grows mu. Candidate kernels are accepted
/// only if they lower ||G(y) - h*F(y,h)||^2 + gamma ||h||_1; otherwise the
/// step size halves permanently.
Stage2Result stage2(const Problem& p, const Kernel& h0, const StageConfig& cfg,
                    const HqsConfig& hqs);

// ---------------------------------------------------------------------------
// Full pipeline.
// ---------------------------------------------------------------------------

// Pipeline defaults differ from the per-operation defaults where plain
// settings fail at low photon counts: F uses 20 TV-regularized RL iterations,
// the length model carries constants fitted by calibrate_init() on synthetic
// line blurs, and Stage I uses wider finite differences and a larger step
// because the splatted kernel makes the loss kinked at the pixel scale.
struct EstimateConfig {
  RenderConfig render;
  SolverConfig solver{20, 1e-8, Boundary::Symmetric, 0.06};
  InitConfig init{1.07, 0.8, 0.0, 1.0, 4};
  StageConfig stage1{5e-2, 150, 1e-8, LossMode::Intensity};
  StageConfig stage2{2.0, 150, 1e-8, LossMode::Intensity};
  HqsConfig hqs;
  DenoiserKind denoiser = denoisers::AnscombeGaussian{};
  PhotonHeuristicConfig photon;
  double fd_eps = 5e-2;
  bool skip_stage1 = false;  ///< run Stage II straight from the rectilinear init
};

struct EstimateResult {
  Kernel kernel;
  Image image;  ///< deblurred, [0, 1] scale (headroom to 1.5)
  KeyPoints keypoints;
  std::vector<TraceEntry> loss_trace_stage1;
  std::vector<TraceEntry> loss_trace_stage2;
  PhotonLevel alpha_used;
  bool alpha_estimated = false;
  InitResult init;
  double seconds = 0.0;
};

/// init -> Stage I -> Stage II -> final deconvolution. Errors are rethrown as
/// StageError naming the failing stage.
EstimateResult estimate(const Image& y, std::optional<PhotonLevel> alpha,
                        const EstimateConfig& cfg);

}  // namespace pldeconv
