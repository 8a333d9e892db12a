#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pldeconv/types.hpp"

namespace pldeconv {

/// Planar point in pixel units. x grows toward higher columns, y grows toward
/// lower rows (upward), so an angle theta is measured counter-clockwise from
/// the +x axis as the image is displayed.
struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

/// K >= 2 ordered anchor points of a camera trajectory, first one at the
/// origin. The optimizable latent vector excludes the fixed origin:
/// [x1, y1, ..., x_{K-1}, y_{K-1}].
class KeyPoints {
 public:
  /// Throws ValidationError unless K >= 2, points[0] == (0,0) and all
  /// coordinates are finite.
  explicit KeyPoints(std::vector<Point2> points);

  /// Translates an arbitrary point list so its first point sits at the origin.
  static KeyPoints from_points(std::span<const Point2> points);

  /// Inverse of latent().
  static KeyPoints from_latent(std::span<const double> z);

  std::vector<double> latent() const;

  int count() const noexcept { return static_cast<int>(points_.size()); }
  const std::vector<Point2>& points() const noexcept { return points_; }

  KeyPoints scaled(double factor) const;

  bool operator==(const KeyPoints&) const = default;

 private:
  std::vector<Point2> points_;
};

enum class Centering { Centroid, None };

struct RenderConfig {
  int kernel_size = 32;
  int samples = 1024;
  Centering centering = Centering::Centroid;
};

struct Trajectory {
  std::vector<Point2> samples;
};

/// Natural cubic spline through a point list, parameterized by cumulative
/// chord length. Consecutive duplicates are merged first.
class ChordSpline {
 public:
  explicit ChordSpline(std::span<const Point2> points);

  /// Parameter values of the (merged) knots; front() == 0, back() == length().
  const std::vector<double>& knots() const noexcept { return knots_; }
  double length() const noexcept { return knots_.back(); }

  /// Position at chord parameter t, clamped to [0, length()]. Exact at knots.
  Point2 evaluate(double t) const;

 private:
  std::vector<double> knots_;
  std::vector<Point2> points_;
  std::vector<Point2> second_;  // second derivatives at the knots
};

/// S samples at chord parameters uniformly spaced over [0, length].
Trajectory interpolate_spline(const KeyPoints& z, int samples);

/// Moves a point source along the trajectory and averages: every sample is
/// splatted with bilinear weights, then the grid is divided by the sample
/// count. Under Centroid centering the sample mean lands on the window center
/// ((M-1)/2, (M-1)/2); under None the origin does.
/// Throws RenderError when a sample leaves the window.
Kernel render_trajectory(const Trajectory& trajectory, const RenderConfig& cfg);

/// render_trajectory(interpolate_spline(z, cfg.samples), cfg).
Kernel render_kernel(const KeyPoints& z, const RenderConfig& cfg);

/// Random walk from the origin: K-1 steps with direction ~ U[0, 360) degrees
/// and length ~ U[0, 100/(K-1)]. Deterministic per seed.
KeyPoints random_keypoints(int count, std::uint64_t seed);

struct KernelSample {
  KeyPoints keypoints;
  Kernel kernel;
};

/// Dataset record `index` uses seed `seed + index`. The walk is multiplied by
/// `scale`; when the result leaves the window the scale is shrunk by 0.8 and
/// the render retried, up to kMaxRetries times.
KernelSample generate_kernel_sample(int index, int count, const RenderConfig& cfg,
                                    std::uint64_t seed, double scale);

std::vector<KernelSample> generate_kernel_dataset(int n, int count, const RenderConfig& cfg,
                                                  std::uint64_t seed, double scale = 0.3);

inline constexpr int kMaxRetries = 5;

/// K equally spaced points along the ray at angle theta (degrees) with total
/// length rho.
KeyPoints keypoints_from_line(double rho, double theta_deg, int count);

/// (cos, sin) of an angle in degrees, exact at multiples of 90.
Point2 unit_vector_degrees(double theta_deg);

}  // namespace pldeconv
