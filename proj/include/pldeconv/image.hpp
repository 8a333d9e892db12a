#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pldeconv {

/// Row-major 2-D grid of doubles. Used for images, kernels in flight and
/// kernel-shaped gradients alike.
class Image {
 public:
  Image() = default;
  Image(int height, int width, double fill = 0.0);
  Image(int height, int width, std::vector<double> data);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int r, int c) noexcept {
    return data_[static_cast<std::size_t>(r) * width_ + c];
  }
  double operator()(int r, int c) const noexcept {
    return data_[static_cast<std::size_t>(r) * width_ + c];
  }

  std::span<double> pixels() noexcept { return data_; }
  std::span<const double> pixels() const noexcept { return data_; }
  std::span<double> row(int r) noexcept {
    return std::span<double>(data_).subspan(static_cast<std::size_t>(r) * width_, width_);
  }
  std::span<const double> row(int r) const noexcept {
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(r) * width_, width_);
  }

  bool same_shape(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  bool operator==(const Image&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Throws DimensionError unless `a` and `b` have identical dimensions.
void require_same_shape(const Image& a, const Image& b, const char* where);

double sum(const Image& x);
double max_value(const Image& x);
double min_value(const Image& x);
double dot(const Image& a, const Image& b);
double squared_distance(const Image& a, const Image& b);

Image scaled(const Image& x, double factor);
Image clipped(const Image& x, double lo, double hi);
Image flipped_vertical(const Image& x);
Image flipped_horizontal(const Image& x);

}  // namespace pldeconv
