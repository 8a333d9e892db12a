#pragma once

#include <cstdint>
#include <vector>

#include "pldeconv/estimation.hpp"

namespace pldeconv::synthetic {

/// Piecewise-constant test scene on [0, 1]: a dim background with rotated
/// ellipses and rectangles of random brightness, at least one of them at
/// full brightness. Edges in all orientations make directional gradient
/// statistics well defined. Deterministic per seed.
Image make_scene(int height, int width, std::uint64_t seed, int shapes = 10);

struct RectilinearBlur {
  double rho;
  double theta_deg;
  Kernel kernel;
  Image blurred;  ///< noiseless blur-only image
};

/// Scene `seed` blurred by a straight-line kernel of the given length/angle.
RectilinearBlur rectilinear_blur(int size, int kernel_size, double rho, double theta_deg,
                                 std::uint64_t seed, Boundary b = Boundary::Symmetric,
                                 int shapes = 10);

/// Calibration set for the initialization length model: `count` scenes blurred
/// with rho ~ U[rho_lo, rho_hi] and theta ~ U[0, 180).
std::vector<CalibrationSample> calibration_set(int count, int size, int kernel_size,
                                               double rho_lo, double rho_hi, std::uint64_t seed,
                                               double theta_step = 1.0);

}  // namespace pldeconv::synthetic
