#include "pldeconv/estimation.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pldeconv/convolution.hpp"
#include "pldeconv/error.hpp"

namespace pldeconv {

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

DirectionalMinimum min_directional_gradient(const Image& blur_only, double theta_step) {
  if (!(theta_step > 0.0) || theta_step > 180.0) {
    throw DomainError("init: theta_step must lie in (0, 180]");
  }
  const auto [dx, dy] = central_gradients(blur_only);
  DirectionalMinimum best{0.0, std::numeric_limits<double>::infinity()};
  const int steps = static_cast<int>(std::floor(180.0 / theta_step + 1e-9));
  for (int k = 1; k <= steps; ++k) {
    const double theta = k * theta_step;
    const Point2 u = unit_vector_degrees(theta);
    double f = 0.0;
    auto px = dx.pixels();
    auto py = dy.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) {
      f = std::max(f, std::abs(px[i] * u.x - py[i] * u.y));
    }
    if (f < best.f_min) best = {theta, f};
  }
  return best;
}

double predicted_length(const InitConfig& cfg, double f_min) {
  if (!(f_min > 0.0)) return std::numeric_limits<double>::infinity();
  const double inner = cfg.c0 * cfg.c0 / (f_min * f_min) - cfg.sigma_b * cfg.sigma_b;
  return cfg.c1 * std::sqrt(std::max(inner, 0.0));
}

InitResult init_kernel(const Image& blur_only, const InitConfig& cfg, int kernel_size) {
  if (blur_only.height() < 8 || blur_only.width() < 8) {
    throw DimensionError("init: image must be at least 8x8");
  }
  if (!(cfg.c0 > 0.0) || !(cfg.c1 > 0.0) || cfg.sigma_b < 0.0) {
    throw DomainError("init: c0, c1 must be positive and sigma_b nonnegative");
  }
  const auto [dx, dy] = central_gradients(blur_only);
  double largest = 0.0;
  for (double v : dx.pixels()) largest = std::max(largest, std::abs(v));
  for (double v : dy.pixels()) largest = std::max(largest, std::abs(v));
  if (largest == 0.0) {
    return {keypoints_from_line(0.0, 0.0, cfg.keypoints), 0.0, 0.0, 0.0, true};
  }
  const DirectionalMinimum m = min_directional_gradient(blur_only, cfg.theta_step);
  const double rho = std::clamp(predicted_length(cfg, m.f_min), 0.0,
                                static_cast<double>(kernel_size - 2));
  return {keypoints_from_line(rho, m.theta_deg, cfg.keypoints), rho, m.theta_deg, m.f_min, false};
}

InitConfig calibrate_init(std::span<const CalibrationSample> samples, InitConfig cfg) {
  if (samples.size() < 2) throw DomainError("calibrate_init: need at least two samples");
  // rho^2 = A u - B with u = 1/f^2.
  double su = 0.0, sr = 0.0, suu = 0.0, sur = 0.0;
  const double n = static_cast<double>(samples.size());
  for (const CalibrationSample& s : samples) {
    if (!(s.f_min > 0.0)) throw DomainError("calibrate_init: f_min must be positive");
    const double u = 1.0 / (s.f_min * s.f_min);
    const double r = s.rho_true * s.rho_true;
    su += u;
    sr += r;
    suu += u * u;
    sur += u * r;
  }
  const double denom = n * suu - su * su;
  double a = 0.0;
  double b = 0.0;
  if (denom > 0.0) {
    a = (n * sur - su * sr) / denom;
    b = -(sr - a * su) / n;
  }
  if (!(a > 0.0) || b < 0.0) {
    // Degenerate or negative intrinsic blur: fit A alone through the origin.
    a = sur / suu;
    b = 0.0;
  }
  if (!(a > 0.0)) throw DomainError("calibrate_init: fit produced a non-positive scale");
  cfg.c0 = std::sqrt(a) / cfg.c1;
  cfg.sigma_b = std::sqrt(b) / cfg.c1;
  return cfg;
}

// ---------------------------------------------------------------------------
// Losses and gradients
// ---------------------------------------------------------------------------

double loss_of_kernel(const Problem& p, const Image& taps, LossMode mode) {
  const Image xhat = richardson_lucy_grid(p.y, taps, p.alpha, p.solver);
  return reblur_loss(p.blur_only, taps, xhat, mode, p.solver.boundary);
}

double loss_of_z(const Problem& p, const KeyPoints& z, LossMode mode) {
  return loss_of_kernel(p, render_kernel(z, p.render).grid(), mode);
}

std::vector<double> grad_z(const Problem& p, const KeyPoints& z, double eps, LossMode mode) {
  if (!(eps > 0.0)) throw DomainError("grad_z: eps must be positive");
  const std::vector<double> base = z.latent();
  const int dims = static_cast<int>(base.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  // values[2i] = L(z + eps e_i), values[2i+1] = L(z - eps e_i); NaN = outside window.
  std::vector<double> values(2 * dims, nan);

#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < 2 * dims; ++j) {
    std::vector<double> shifted = base;
    shifted[j / 2] += (j % 2 == 0) ? eps : -eps;
    try {
      values[j] = loss_of_z(p, KeyPoints::from_latent(shifted), mode);
    } catch (const RenderError&) {
      values[j] = nan;
    }
  }

  std::vector<double> grad(dims, 0.0);
  std::optional<double> center;
  for (int i = 0; i < dims; ++i) {
    const double plus = values[2 * i];
    const double minus = values[2 * i + 1];
    const bool has_plus = !std::isnan(plus);
    const bool has_minus = !std::isnan(minus);
    if (has_plus && has_minus) {
      grad[i] = (plus - minus) / (2.0 * eps);
      continue;
    }
    if (!has_plus && !has_minus) continue;
    if (!center) center = loss_of_z(p, z, mode);
    grad[i] = has_plus ? (plus - *center) / eps : (*center - minus) / eps;
  }
  return grad;
}

Image grad_h_fixed_xhat(const Image& blur_only, const Image& taps, const Image& xhat, Boundary b,
                        LossMode mode) {
  require_same_shape(blur_only, xhat, "grad_h_fixed_xhat");
  const int m = taps.height();
  const Image reblurred = convolve_grid(xhat, taps, b);
  Image residual(blur_only.height(), blur_only.width());
  {
    auto pg = blur_only.pixels();
    auto pr = reblurred.pixels();
    auto po = residual.pixels();
    for (std::size_t i = 0; i < po.size(); ++i) po[i] = pg[i] - pr[i];
  }
  if (mode == LossMode::GradientDomain) {
    const auto [rx, ry] = spatial_gradients(residual);
    residual = spatial_gradients_adjoint(rx, ry);
  }
  return scaled(correlate(residual, xhat, m, b), -2.0);
}

double soft_threshold(double v, double lambda) {
  const double mag = std::max(std::abs(v) - lambda, 0.0);
  return v < 0.0 ? -mag : mag;
}

Image soft_threshold(const Image& v, double lambda) {
  if (lambda < 0.0) throw DomainError("soft_threshold: lambda must be nonnegative");
  Image out = v;
  for (double& x : out.pixels()) x = soft_threshold(x, lambda);
  return out;
}

double hqs_mu(const HqsConfig& cfg, int k) { return cfg.mu0 * std::pow(cfg.mu_growth, k); }

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

namespace {

void validate(const StageConfig& cfg) {
  if (!(cfg.step_size > 0.0)) throw DomainError("stage: step_size must be positive");
  if (cfg.max_iters < 1) throw DomainError("stage: max_iters must be at least 1");
}

double l1_norm(const Image& x) {
  double s = 0.0;
  for (double v : x.pixels()) s += std::abs(v);
  return s;
}

}  // namespace

Stage1Result stage1(const Problem& p, const KeyPoints& z0, const StageConfig& cfg, double fd_eps) {
  validate(cfg);
  Stage1Result result{z0, {}, 0};
  KeyPoints z = z0;
  double loss = loss_of_z(p, z, cfg.loss_mode);
  double step = cfg.step_size;
  result.trace.push_back({0, loss, step});

  while (result.iterations < cfg.max_iters && step >= cfg.min_step) {
    ++result.iterations;
    const std::vector<double> g = grad_z(p, z, fd_eps, cfg.loss_mode);
    if (std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; })) break;
    const std::vector<double> base = z.latent();
    bool accepted = false;
    while (step >= cfg.min_step) {
      std::vector<double> cand = base;
      for (std::size_t i = 0; i < cand.size(); ++i) cand[i] -= step * g[i];
      const KeyPoints zc = KeyPoints::from_latent(cand);
      double lc = std::numeric_limits<double>::infinity();
      try {
        lc = loss_of_z(p, zc, cfg.loss_mode);
      } catch (const RenderError&) {
      }
      if (lc < loss) {
        z = zc;
        loss = lc;
        result.trace.push_back({result.iterations, loss, step});
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  result.keypoints = z;
  return result;
}

Stage2Result stage2(const Problem& p, const Kernel& h0, const StageConfig& cfg,
                    const HqsConfig& hqs) {
  validate(cfg);
  if (!(hqs.mu0 > 0.0) || !(hqs.gamma > 0.0) || hqs.mu_growth < 1.0) {
    throw DomainError("stage2: mu0, gamma must be positive and mu_growth >= 1");
  }
  const Boundary b = p.solver.boundary;
  Image h = h0.grid();
  Image v = h;
  double mu = hqs.mu0;
  double step = cfg.step_size;

  Image xhat = richardson_lucy_grid(p.y, h, p.alpha, p.solver);
  double objective = reblur_loss(p.blur_only, h, xhat, cfg.loss_mode, b) + hqs.gamma * l1_norm(h);
  Stage2Result result{h0, {{0, objective, step}}, 0, mu};

  while (result.iterations < cfg.max_iters && step >= cfg.min_step) {
    ++result.iterations;
    const Image grad = grad_h_fixed_xhat(p.blur_only, h, xhat, b, cfg.loss_mode);
    Image cand = h;
    {
      auto pc = cand.pixels();
      auto pg = grad.pixels();
      auto ph = h.pixels();
      auto pv = v.pixels();
      for (std::size_t i = 0; i < pc.size(); ++i) {
        pc[i] = ph[i] - step * (pg[i] + mu * (ph[i] - pv[i]));
      }
    }
    bool accepted = false;
    try {
      const Kernel projected = Kernel::project(cand);
      Image xc = richardson_lucy_grid(p.y, projected.grid(), p.alpha, p.solver);
      const double oc = reblur_loss(p.blur_only, projected.grid(), xc, cfg.loss_mode, b) +
                        hqs.gamma * l1_norm(projected.grid());
      if (oc < objective) {
        h = projected.grid();
        xhat = std::move(xc);
        objective = oc;
        v = soft_threshold(h, hqs.gamma / mu);
        result.trace.push_back({result.iterations, objective, step});
        accepted = true;
      }
    } catch (const ValidationError&) {
      // Step removed all positive mass; treat as a failed step.
    }
    if (!accepted) step *= 0.5;
    mu *= hqs.mu_growth;
  }
  result.kernel = Kernel(h);
  result.final_mu = mu;
  return result;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

namespace {

template <typename F>
auto labeled(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

EstimateResult estimate(const Image& y, std::optional<PhotonLevel> alpha,
                        const EstimateConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  for (double v : y.pixels()) {
    if (!std::isfinite(v)) throw StageError("input", "observation contains non-finite values");
  }
  const bool estimated = !alpha.has_value();
  const PhotonLevel a =
      labeled("photon-level", [&] { return alpha ? *alpha : estimate_photon_level(y, cfg.photon); });
  Image blur_only = labeled("denoise", [&] { return denoise(y, a, cfg.denoiser); });
  const InitResult init =
      labeled("init", [&] { return init_kernel(blur_only, cfg.init, cfg.render.kernel_size); });

  Problem problem{y, a, std::move(blur_only), cfg.solver, cfg.render};

  KeyPoints z = init.keypoints;
  std::vector<TraceEntry> trace1;
  if (!cfg.skip_stage1) {
    Stage1Result s1 = labeled("stage1", [&] { return stage1(problem, z, cfg.stage1, cfg.fd_eps); });
    z = s1.keypoints;
    trace1 = std::move(s1.trace);
  }
  Stage2Result s2 = labeled("stage2", [&] {
    return stage2(problem, render_kernel(z, cfg.render), cfg.stage2, cfg.hqs);
  });
  Image image = labeled("deconvolution",
                        [&] { return richardson_lucy(y, s2.kernel, a, cfg.solver); });

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return EstimateResult{std::move(s2.kernel), std::move(image), std::move(z), std::move(trace1),
                        std::move(s2.trace), a, estimated, init, seconds};
}

}  // namespace pldeconv
