#include "pldeconv/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "pldeconv/error.hpp"

namespace pldeconv {

namespace {

// Chords shorter than this are treated as repeated key points.
constexpr double kMergeTolerance = 1e-12;

// Solves the natural-spline tridiagonal system for one coordinate.
std::vector<double> natural_second_derivatives(const std::vector<double>& t,
                                               const std::vector<double>& v) {
  const std::size_t n = t.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  const std::size_t inner = n - 2;
  std::vector<double> diag(inner), upper(inner), rhs(inner);
  for (std::size_t i = 0; i < inner; ++i) {
    const double h0 = t[i + 1] - t[i];
    const double h1 = t[i + 2] - t[i + 1];
    diag[i] = 2.0 * (h0 + h1);
    upper[i] = h1;
    rhs[i] = 6.0 * ((v[i + 2] - v[i + 1]) / h1 - (v[i + 1] - v[i]) / h0);
  }
  // Thomas algorithm; the sub-diagonal entry of row i equals upper[i-1].
  for (std::size_t i = 1; i < inner; ++i) {
    const double w = upper[i - 1] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m[inner] = rhs[inner - 1] / diag[inner - 1];
  for (std::size_t i = inner - 1; i-- > 0;) {
    m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
  }
  return m;
}

struct AxisSplat {
  int lo;
  int hi;
  double w_lo;
  double w_hi;
};

// Bilinear weights along one axis for an offset `d` from the window center.
// Computed from |d| and mirrored, so d and -d give exactly mirrored weights.
AxisSplat splat_axis(double d, int size) {
  const bool even = size % 2 == 0;
  const double a = std::abs(d);
  const double t = even ? a + 0.5 : a;
  const double n = std::floor(t);
  const double f = t - n;
  const int base = even ? size / 2 - 1 : (size - 1) / 2;
  AxisSplat s{base + static_cast<int>(n), base + static_cast<int>(n) + 1, 1.0 - f, f};
  if (d < 0.0) {
    s.lo = size - 1 - s.lo;
    s.hi = size - 1 - s.hi;
  }
  return s;
}

}  // namespace

KeyPoints::KeyPoints(std::vector<Point2> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw ValidationError("key points: need at least 2 points, got " +
                          std::to_string(points_.size()));
  }
  if (points_.front().x != 0.0 || points_.front().y != 0.0) {
    throw ValidationError("key points: first point must be the origin");
  }
  for (const Point2& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw ValidationError("key points: non-finite coordinate");
    }
  }
}

KeyPoints KeyPoints::from_points(std::span<const Point2> points) {
  if (points.empty()) throw ValidationError("key points: empty point list");
  const Point2 o = points.front();
  std::vector<Point2> shifted;
  shifted.reserve(points.size());
  for (const Point2& p : points) shifted.push_back({p.x - o.x, p.y - o.y});
  shifted.front() = {0.0, 0.0};
  return KeyPoints(std::move(shifted));
}

KeyPoints KeyPoints::from_latent(std::span<const double> z) {
  if (z.size() < 2 || z.size() % 2 != 0) {
    throw ValidationError("latent vector length must be a positive even number, got " +
                          std::to_string(z.size()));
  }
  std::vector<Point2> pts{{0.0, 0.0}};
  for (std::size_t i = 0; i < z.size(); i += 2) pts.push_back({z[i], z[i + 1]});
  return KeyPoints(std::move(pts));
}

std::vector<double> KeyPoints::latent() const {
  std::vector<double> z;
  z.reserve(2 * (points_.size() - 1));
  for (std::size_t i = 1; i < points_.size(); ++i) {
    z.push_back(points_[i].x);
    z.push_back(points_[i].y);
  }
  return z;
}

KeyPoints KeyPoints::scaled(double factor) const {
  std::vector<Point2> pts = points_;
  for (Point2& p : pts) {
    p.x *= factor;
    p.y *= factor;
  }
  pts.front() = {0.0, 0.0};
  return KeyPoints(std::move(pts));
}

ChordSpline::ChordSpline(std::span<const Point2> points) {
  if (points.empty()) throw ValidationError("spline: no points");
  points_.push_back(points.front());
  knots_.push_back(0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double chord = std::hypot(points[i].x - points_.back().x, points[i].y - points_.back().y);
    if (chord <= kMergeTolerance) continue;
    knots_.push_back(knots_.back() + chord);
    points_.push_back(points[i]);
  }
  std::vector<double> xs, ys;
  for (const Point2& p : points_) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  const auto mx = natural_second_derivatives(knots_, xs);
  const auto my = natural_second_derivatives(knots_, ys);
  second_.resize(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) second_[i] = {mx[i], my[i]};
}

Point2 ChordSpline::evaluate(double t) const {
  if (points_.size() == 1 || t <= 0.0) return points_.front();
  if (t >= knots_.back()) return points_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double h = knots_[k + 1] - knots_[k];
  const double u = t - knots_[k];
  auto coord = [&](double v0, double v1, double m0, double m1) {
    const double slope = (v1 - v0) / h - h * (2.0 * m0 + m1) / 6.0;
    return v0 + u * (slope + u * (0.5 * m0 + u * (m1 - m0) / (6.0 * h)));
  };
  return {coord(points_[k].x, points_[k + 1].x, second_[k].x, second_[k + 1].x),
          coord(points_[k].y, points_[k + 1].y, second_[k].y, second_[k + 1].y)};
}

Trajectory interpolate_spline(const KeyPoints& z, int samples) {
  if (samples < z.count() || samples < 2) {
    throw ValidationError("spline: need at least max(K, 2) samples, got " +
                          std::to_string(samples));
  }
  const ChordSpline spline(z.points());
  Trajectory traj;
  traj.samples.reserve(samples);
  const double denom = static_cast<double>(samples - 1);
  for (int s = 0; s < samples; ++s) {
    traj.samples.push_back(spline.evaluate(spline.length() * (static_cast<double>(s) / denom)));
  }
  return traj;
}

Kernel render_trajectory(const Trajectory& trajectory, const RenderConfig& cfg) {
  const int m = cfg.kernel_size;
  if (m < 3) throw ValidationError("render: kernel size must be at least 3");
  if (trajectory.samples.empty()) throw ValidationError("render: empty trajectory");

  Point2 center{0.0, 0.0};
  if (cfg.centering == Centering::Centroid) {
    double sx = 0.0;
    double sy = 0.0;
    for (const Point2& p : trajectory.samples) {
      sx += p.x;
      sy += p.y;
    }
    const double n = static_cast<double>(trajectory.samples.size());
    center = {sx / n, sy / n};
  }

  const double limit = 0.5 * (m - 1);
  double excursion = 0.0;
  for (const Point2& p : trajectory.samples) {
    excursion = std::max({excursion, std::abs(p.x - center.x), std::abs(p.y - center.y)});
  }
  if (!(excursion <= limit)) {
    throw RenderError("render: trajectory reaches " + std::to_string(excursion) +
                          " px from the window center, window half-width is " +
                          std::to_string(limit),
                      excursion);
  }

  Image grid(m, m, 0.0);
  for (const Point2& p : trajectory.samples) {
    // Rows grow downward while y grows upward.
    const AxisSplat r = splat_axis(-(p.y - center.y), m);
    const AxisSplat c = splat_axis(p.x - center.x, m);
    const bool r_hi = r.w_hi != 0.0;
    const bool c_hi = c.w_hi != 0.0;
    grid(r.lo, c.lo) += r.w_lo * c.w_lo;
    if (c_hi) grid(r.lo, c.hi) += r.w_lo * c.w_hi;
    if (r_hi) grid(r.hi, c.lo) += r.w_hi * c.w_lo;
    if (r_hi && c_hi) grid(r.hi, c.hi) += r.w_hi * c.w_hi;
  }
  const double n = static_cast<double>(trajectory.samples.size());
  for (double& v : grid.pixels()) v /= n;
  return Kernel(std::move(grid));
}

Kernel render_kernel(const KeyPoints& z, const RenderConfig& cfg) {
  return render_trajectory(interpolate_spline(z, cfg.samples), cfg);
}

KeyPoints random_keypoints(int count, std::uint64_t seed) {
  if (count < 2) throw ValidationError("random_keypoints: K must be at least 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> direction(0.0, 360.0);
  std::uniform_real_distribution<double> length(0.0, 100.0 / (count - 1));
  std::vector<Point2> pts{{0.0, 0.0}};
  for (int k = 1; k < count; ++k) {
    const double theta = direction(rng) * std::numbers::pi / 180.0;
    const double len = length(rng);
    pts.push_back({pts.back().x + len * std::cos(theta), pts.back().y + len * std::sin(theta)});
  }
  return KeyPoints(std::move(pts));
}

KernelSample generate_kernel_sample(int index, int count, const RenderConfig& cfg,
                                    std::uint64_t seed, double scale) {
  const KeyPoints walk = random_keypoints(count, seed + static_cast<std::uint64_t>(index));
  double s = scale;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    KeyPoints z = walk.scaled(s);
    try {
      Kernel h = render_kernel(z, cfg);
      return {std::move(z), std::move(h)};
    } catch (const RenderError& e) {
      if (attempt == kMaxRetries) {
        throw RenderError("record " + std::to_string(index) + ": still outside the window after " +
                              std::to_string(kMaxRetries) + " rescales (" + e.what() + ")",
                          e.excursion());
      }
    }
    s *= 0.8;
  }
  throw RenderError("unreachable", 0.0);
}

std::vector<KernelSample> generate_kernel_dataset(int n, int count, const RenderConfig& cfg,
                                                  std::uint64_t seed, double scale) {
  if (n < 1) throw ValidationError("generate_kernel_dataset: N must be positive");
  std::vector<KernelSample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(generate_kernel_sample(i, count, cfg, seed, scale));
  return out;
}

Point2 unit_vector_degrees(double theta_deg) {
  double t = std::fmod(theta_deg, 360.0);
  if (t < 0.0) t += 360.0;
  if (t == 0.0) return {1.0, 0.0};
  if (t == 90.0) return {0.0, 1.0};
  if (t == 180.0) return {-1.0, 0.0};
  if (t == 270.0) return {0.0, -1.0};
  const double rad = t * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

KeyPoints keypoints_from_line(double rho, double theta_deg, int count) {
  if (count < 2) throw ValidationError("keypoints_from_line: K must be at least 2");
  if (!(rho >= 0.0)) throw DomainError("keypoints_from_line: rho must be nonnegative");
  const Point2 u = unit_vector_degrees(theta_deg);
  std::vector<Point2> pts;
  for (int k = 0; k < count; ++k) {
    const double r = k * rho / (count - 1);
    pts.push_back({r * u.x, r * u.y});
  }
  return KeyPoints(std::move(pts));
}

}  // namespace pldeconv
