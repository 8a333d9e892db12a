#include "pldeconv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "pldeconv/convolution.hpp"
#include "pldeconv/error.hpp"

namespace pldeconv {

namespace {

void validate(const SolverConfig& cfg) {
  if (cfg.rl_iterations < 1) throw DomainError("solver: rl_iterations must be at least 1");
  if (!(cfg.floor_eps > 0.0)) throw DomainError("solver: floor_eps must be positive");
  if (!(cfg.tv_weight >= 0.0 && cfg.tv_weight < kMaxTvWeight)) {
    throw DomainError("solver: tv_weight must lie in [0, 0.25)");
  }
}

// Smoothing of |grad x| in the TV term, on the [0, 1] intensity scale.
constexpr double kTvSmoothing = 1e-6;

// Applies x /= (1 - lambda div(grad x / |grad x|)) using the previous iterate.
void apply_tv(const Image& previous, double lambda, Image& x) {
  auto [gx, gy] = spatial_gradients(previous);
  auto px = gx.pixels();
  auto py = gy.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double norm = std::sqrt(px[i] * px[i] + py[i] * py[i] + kTvSmoothing);
    px[i] /= norm;
    py[i] /= norm;
  }
  // The adjoint of the forward difference is minus the divergence.
  const Image neg_div = spatial_gradients_adjoint(gx, gy);
  auto out = x.pixels();
  auto nd = neg_div.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= 1.0 + lambda * nd[i];
}

}  // namespace

Image rl_update(const Image& x, const Image& y, const Image& taps, double alpha,
                const SolverConfig& cfg) {
  const Image blurred = convolve_grid(x, taps, cfg.boundary);
  Image ratio(y.height(), y.width());
  {
    auto py = y.pixels();
    auto pb = blurred.pixels();
    auto pr = ratio.pixels();
    for (std::size_t i = 0; i < pr.size(); ++i) pr[i] = py[i] / (alpha * pb[i] + cfg.floor_eps);
  }
  Image correction = correlate_image(ratio, taps, cfg.boundary);
  auto px = x.pixels();
  auto pc = correction.pixels();
  for (std::size_t i = 0; i < pc.size(); ++i) pc[i] *= px[i];
  if (cfg.tv_weight > 0.0 && x.height() >= 2 && x.width() >= 2) {
    apply_tv(x, cfg.tv_weight, correction);
  }
  return correction;
}

Image richardson_lucy_grid(const Image& y, const Image& taps, PhotonLevel alpha,
                           const SolverConfig& cfg, const std::optional<Image>& start) {
  validate(cfg);
  const double a = alpha.value();
  Image y_pos = clipped(y, 0.0, std::numeric_limits<double>::infinity());
  Image x;
  if (start) {
    require_same_shape(*start, y, "richardson_lucy");
    x = *start;
  } else {
    x = scaled(y_pos, 1.0 / a);
    for (double& v : x.pixels()) v = std::max(v, cfg.floor_eps);
  }
  for (int it = 0; it < cfg.rl_iterations; ++it) x = rl_update(x, y_pos, taps, a, cfg);
  return clipped(x, 0.0, kRlHeadroom);
}

Image richardson_lucy(const Image& y, const Kernel& h, PhotonLevel alpha, const SolverConfig& cfg,
                      const std::optional<Image>& start) {
  return richardson_lucy_grid(y, h.grid(), alpha, cfg, start);
}

double poisson_log_likelihood(const Image& y, const Image& x, const Kernel& h, PhotonLevel alpha,
                              Boundary b) {
  const Image mean = scaled(convolve(x, h, b), alpha.value());
  double ll = 0.0;
  auto py = y.pixels();
  auto pm = mean.pixels();
  for (std::size_t i = 0; i < py.size(); ++i) {
    if (py[i] > 0.0) ll += py[i] * std::log(pm[i]);
    ll -= pm[i];
  }
  return ll;
}

Image denoise(const Image& y, PhotonLevel alpha, const DenoiserKind& d) {
  const double a = alpha.value();
  return std::visit(
      [&](const auto& kind) -> Image {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, denoisers::Oracle>) {
          require_same_shape(kind.blur_only, y, "denoise(oracle)");
          return kind.blur_only;
        } else if constexpr (std::is_same_v<T, denoisers::Identity>) {
          return clipped(scaled(y, 1.0 / a), 0.0, 1.0);
        } else {
          Image u(y.height(), y.width());
          auto py = y.pixels();
          auto pu = u.pixels();
          for (std::size_t i = 0; i < pu.size(); ++i) {
            pu[i] = 2.0 * std::sqrt(std::max(py[i], 0.0) + 0.375);
          }
          Image out = gaussian_filter(u, kind.sigma);
          for (double& v : out.pixels()) {
            const double half = 0.5 * v;
            v = std::clamp((half * half - 0.375) / a, 0.0, 1.0);
          }
          return out;
        }
      },
      d);
}

double reblur_loss(const Image& blur_only, const Image& taps, const Image& xhat, LossMode mode,
                   Boundary b) {
  require_same_shape(blur_only, xhat, "reblur_loss");
  const Image reblurred = convolve_grid(xhat, taps, b);
  if (mode == LossMode::Intensity) return squared_distance(blur_only, reblurred);
  const auto [gx, gy] = spatial_gradients(blur_only);
  const auto [rx, ry] = spatial_gradients(reblurred);
  return squared_distance(gx, rx) + squared_distance(gy, ry);
}

double reblur_loss(const Image& blur_only, const Kernel& h, const Image& xhat, LossMode mode,
                   Boundary b) {
  return reblur_loss(blur_only, h.grid(), xhat, mode, b);
}

}  // namespace pldeconv
