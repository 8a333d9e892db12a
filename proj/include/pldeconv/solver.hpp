#pragma once

#include <optional>
#include <variant>

#include "pldeconv/image.hpp"
#include "pldeconv/types.hpp"

namespace pldeconv {

struct SolverConfig {
  int rl_iterations = 50;
  double floor_eps = 1e-8;
  Boundary boundary = Boundary::Symmetric;
  /// Total-variation weight lambda of the regularized update
  /// x <- x * correction / (1 - lambda div(grad x / |grad x|)). 0 gives plain
  /// Richardson-Lucy. Must stay below 0.25 so the denominator is positive.
  double tv_weight = 0.0;
};

/// Largest admissible SolverConfig::tv_weight (exclusive).
inline constexpr double kMaxTvWeight = 0.25;

/// Upper clip applied to the final Richardson-Lucy estimate.
inline constexpr double kRlHeadroom = 1.5;

/// One multiplicative Richardson-Lucy update on the clean-image scale:
/// x <- x * correlate_image(y / (alpha (h * x) + eps), h), divided by the TV
/// term when cfg.tv_weight > 0.
Image rl_update(const Image& x, const Image& y, const Image& taps, double alpha,
                const SolverConfig& cfg);

/// Non-blind Poisson deconvolution. Starts from max(y/alpha, eps) unless `start`
/// is given, runs cfg.rl_iterations updates and clips to [0, 1.5].
Image richardson_lucy(const Image& y, const Kernel& h, PhotonLevel alpha, const SolverConfig& cfg,
                      const std::optional<Image>& start = std::nullopt);

/// Same as richardson_lucy() but for an arbitrary nonnegative tap grid.
Image richardson_lucy_grid(const Image& y, const Image& taps, PhotonLevel alpha,
                           const SolverConfig& cfg,
                           const std::optional<Image>& start = std::nullopt);

/// Poisson log-likelihood sum(y log(alpha h*x) - alpha h*x), dropping the
/// constant log(y!) term.
double poisson_log_likelihood(const Image& y, const Image& x, const Kernel& h, PhotonLevel alpha,
                              Boundary b);

namespace denoisers {

/// Returns a stored noiseless blur-only image verbatim.
struct Oracle {
  Image blur_only;
};

/// Anscombe transform, Gaussian smoothing, algebraic inverse.
struct AnscombeGaussian {
  double sigma = 1.5;
};

/// y / alpha clipped to [0, 1].
struct Identity {};

}  // namespace denoisers

using DenoiserKind =
    std::variant<denoisers::AnscombeGaussian, denoisers::Oracle, denoisers::Identity>;

/// Estimate of the blur-only image h*x on the [0, 1] scale.
Image denoise(const Image& y, PhotonLevel alpha, const DenoiserKind& d);

enum class LossMode { Intensity, GradientDomain };

/// ||blur_only - h*xhat||^2, or the same norm summed over the horizontal and
/// vertical forward-difference channels in GradientDomain mode.
double reblur_loss(const Image& blur_only, const Image& taps, const Image& xhat, LossMode mode,
                   Boundary b);
double reblur_loss(const Image& blur_only, const Kernel& h, const Image& xhat, LossMode mode,
                   Boundary b);

}  // namespace pldeconv
