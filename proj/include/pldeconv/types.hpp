#pragma once

#include "pldeconv/image.hpp"

namespace pldeconv {

enum class Boundary { Symmetric, Circular };

/// Square, nonnegative blur kernel whose entries sum to one.
///
/// The convolution origin is the pixel (size/2, size/2); for odd sizes this
/// is the geometric center of the window.
class Kernel {
 public:
  static constexpr double kSumTolerance = 1e-9;

  /// Validates the grid; throws ValidationError on negative entries, a sum
  /// away from one, or a non-square grid.
  explicit Kernel(Image grid);

  /// Clips negatives to zero and rescales to unit sum. Throws ValidationError
  /// when nothing positive remains.
  static Kernel project(const Image& grid);

  /// Single unit tap at the convolution origin.
  static Kernel delta(int size);

  int size() const noexcept { return grid_.height(); }
  int origin() const noexcept { return size() / 2; }
  const Image& grid() const noexcept { return grid_; }
  double operator()(int r, int c) const noexcept { return grid_(r, c); }

  bool operator==(const Kernel&) const = default;

 private:
  Image grid_;
};

/// Mean photon count per pixel at unit intensity.
class PhotonLevel {
 public:
  explicit PhotonLevel(double alpha);
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

struct NoiseParams {
  PhotonLevel alpha;
  double sigma_read = 0.0;  ///< read-noise std in electrons
};

}  // namespace pldeconv
