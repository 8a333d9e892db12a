#include "pldeconv/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "pldeconv/convolution.hpp"
#include "pldeconv/error.hpp"

namespace pldeconv::synthetic {

Image make_scene(int height, int width, std::uint64_t seed, int shapes) {
  if (height < 1 || width < 1 || shapes < 1) throw DomainError("make_scene: bad size or shape count");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double extent = std::min(height, width);
  Image x(height, width, 0.1 + 0.2 * unit(rng));

  constexpr int kSuper = 4;
  for (int s = 0; s < shapes; ++s) {
    const double cy = unit(rng) * height;
    const double cx = unit(rng) * width;
    const double ra = extent * (0.06 + 0.2 * unit(rng));
    const double rb = extent * (0.06 + 0.2 * unit(rng));
    const double phi = unit(rng) * std::numbers::pi;
    const bool ellipse = unit(rng) < 0.5;
    const double value = s == shapes - 1 ? 1.0 : 0.2 + 0.8 * unit(rng);
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    // 4x4 supersampled coverage keeps edges free of axis-aligned staircases.
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        int hits = 0;
        for (int i = 0; i < kSuper; ++i) {
          for (int j = 0; j < kSuper; ++j) {
            const double py = r + (i + 0.5) / kSuper - 0.5;
            const double px = c + (j + 0.5) / kSuper - 0.5;
            const double u = (px - cx) * cp + (py - cy) * sp;
            const double v = -(px - cx) * sp + (py - cy) * cp;
            const bool inside = ellipse ? (u * u) / (ra * ra) + (v * v) / (rb * rb) <= 1.0
                                        : std::abs(u) <= ra && std::abs(v) <= rb;
            hits += inside;
          }
        }
        const double w = static_cast<double>(hits) / (kSuper * kSuper);
        x(r, c) = (1.0 - w) * x(r, c) + w * value;
      }
    }
  }
  return x;
}

RectilinearBlur rectilinear_blur(int size, int kernel_size, double rho, double theta_deg,
                                 std::uint64_t seed, Boundary b, int shapes) {
  RenderConfig rc;
  rc.kernel_size = kernel_size;
  Kernel h = render_kernel(keypoints_from_line(rho, theta_deg, 2), rc);
  Image blurred = convolve(make_scene(size, size, seed, shapes), h, b);
  return {rho, theta_deg, std::move(h), std::move(blurred)};
}

std::vector<CalibrationSample> calibration_set(int count, int size, int kernel_size,
                                               double rho_lo, double rho_hi, std::uint64_t seed,
                                               double theta_step) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rho(rho_lo, rho_hi);
  std::uniform_real_distribution<double> theta(0.0, 180.0);
  std::vector<CalibrationSample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double r = rho(rng);
    const double t = theta(rng);
    const auto blur = rectilinear_blur(size, kernel_size, r, t, seed * 7919 + i);
    out.push_back({min_directional_gradient(blur.blurred, theta_step).f_min, r});
  }
  return out;
}

}  // namespace pldeconv::synthetic
