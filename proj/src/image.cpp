#include "pldeconv/image.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <string>

#include "pldeconv/error.hpp"
#include "pldeconv/types.hpp"

namespace pldeconv {

Image::Image(int height, int width, double fill)
    : height_(height), width_(width) {
  if (height < 1 || width < 1) {
    throw DimensionError("image dimensions must be positive, got " + std::to_string(height) +
                         "x" + std::to_string(width));
  }
  data_.assign(static_cast<std::size_t>(height) * width, fill);
}

Image::Image(int height, int width, std::vector<double> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height < 1 || width < 1) {
    throw DimensionError("image dimensions must be positive, got " + std::to_string(height) +
                         "x" + std::to_string(width));
  }
  if (data_.size() != static_cast<std::size_t>(height) * width) {
    throw DimensionError("pixel buffer holds " + std::to_string(data_.size()) +
                         " values, expected " + std::to_string(height * width));
  }
}

void require_same_shape(const Image& a, const Image& b, const char* where) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(where) + ": dimension mismatch " +
                         std::to_string(a.height()) + "x" + std::to_string(a.width()) + " vs " +
                         std::to_string(b.height()) + "x" + std::to_string(b.width()));
  }
}

double sum(const Image& x) {
  double s = 0.0;
  for (double v : x.pixels()) s += v;
  return s;
}

double max_value(const Image& x) {
  return *std::max_element(x.pixels().begin(), x.pixels().end());
}

double min_value(const Image& x) {
  return *std::min_element(x.pixels().begin(), x.pixels().end());
}

double dot(const Image& a, const Image& b) {
  require_same_shape(a, b, "dot");
  double s = 0.0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) s += pa[i] * pb[i];
  return s;
}

double squared_distance(const Image& a, const Image& b) {
  require_same_shape(a, b, "squared_distance");
  double s = 0.0;
  auto pa = a.pixels();
  auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const double d = pa[i] - pb[i];
    s += d * d;
  }
  return s;
}

Image scaled(const Image& x, double factor) {
  Image out = x;
  for (double& v : out.pixels()) v *= factor;
  return out;
}

Image clipped(const Image& x, double lo, double hi) {
  Image out = x;
  for (double& v : out.pixels()) v = std::clamp(v, lo, hi);
  return out;
}

Image flipped_vertical(const Image& x) {
  Image out(x.height(), x.width());
  for (int r = 0; r < x.height(); ++r) {
    auto src = x.row(x.height() - 1 - r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Image flipped_horizontal(const Image& x) {
  Image out(x.height(), x.width());
  for (int r = 0; r < x.height(); ++r) {
    for (int c = 0; c < x.width(); ++c) out(r, c) = x(r, x.width() - 1 - c);
  }
  return out;
}

Kernel::Kernel(Image grid) : grid_(std::move(grid)) {
  if (grid_.height() != grid_.width()) {
    throw ValidationError("kernel must be square, got " + std::to_string(grid_.height()) + "x" +
                          std::to_string(grid_.width()));
  }
  for (double v : grid_.pixels()) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("kernel entries must be finite and nonnegative");
    }
  }
  const double s = sum(grid_);
  if (std::abs(s - 1.0) > kSumTolerance) {
    throw ValidationError("kernel entries sum to " + std::to_string(s) + ", expected 1");
  }
}

Kernel Kernel::project(const Image& grid) {
  Image g = clipped(grid, 0.0, std::numeric_limits<double>::infinity());
  const double s = sum(g);
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw ValidationError("kernel projection: no positive mass left");
  }
  for (double& v : g.pixels()) v /= s;
  return Kernel(std::move(g));
}

Kernel Kernel::delta(int size) {
  Image g(size, size, 0.0);
  g(size / 2, size / 2) = 1.0;
  return Kernel(std::move(g));
}

PhotonLevel::PhotonLevel(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("photon level must be positive and finite, got " + std::to_string(alpha));
  }
}

}  // namespace pldeconv
