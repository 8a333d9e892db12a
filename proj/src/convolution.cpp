#include "pldeconv/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pldeconv/error.hpp"
#include "pldeconv/kernels.hpp"

namespace pldeconv {

namespace {

void require_fits(const Image& x, const Image& taps, const char* where) {
  if (taps.height() != taps.width()) {
    throw DimensionError(std::string(where) + ": kernel grid must be square");
  }
  if (taps.height() > x.height() || taps.width() > x.width()) {
    throw DimensionError(std::string(where) + ": kernel " + std::to_string(taps.height()) +
                         "x" + std::to_string(taps.width()) + " larger than image " +
                         std::to_string(x.height()) + "x" + std::to_string(x.width()));
  }
}

// 1-D filter along rows then columns; `taps` has odd length centered.
Image separable(const Image& x, const std::vector<double>& taps, Boundary b) {
  const int radius = static_cast<int>(taps.size() / 2);
  const int h = x.height();
  const int w = x.width();
  Image tmp(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        s += taps[k + radius] * x(r, kernels::boundary_index(c + k, w, b));
      }
      tmp(r, c) = s;
    }
  }
  Image out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        s += taps[k + radius] * tmp(kernels::boundary_index(r + k, h, b), c);
      }
      out(r, c) = s;
    }
  }
  return out;
}

}  // namespace

Image convolve_grid(const Image& x, const Image& taps, Boundary b) {
  require_fits(x, taps, "convolve");
  const int m = taps.height();
  const int o = m / 2;
  const Image padded = kernels::pad(x, m - 1 - o, o, m - 1 - o, o, b);
  Image out(x.height(), x.width());
  kernels::omp::apply_taps(padded, taps, /*flip=*/true, out);
  return out;
}

Image convolve(const Image& x, const Kernel& h, Boundary b) {
  return convolve_grid(x, h.grid(), b);
}

Image correlate_image(const Image& r, const Image& taps, Boundary b) {
  require_fits(r, taps, "correlate_image");
  const int m = taps.height();
  const int o = m / 2;
  const Image padded = kernels::pad(r, o, m - 1 - o, o, m - 1 - o, b);
  Image out(r.height(), r.width());
  kernels::omp::apply_taps(padded, taps, /*flip=*/false, out);
  return out;
}

Image correlate(const Image& r, const Image& g, int kernel_size, Boundary b) {
  require_same_shape(r, g, "correlate");
  if (kernel_size < 1 || kernel_size > g.height() || kernel_size > g.width()) {
    throw DimensionError("correlate: kernel support " + std::to_string(kernel_size) +
                         " does not fit image");
  }
  const int m = kernel_size;
  const int o = m / 2;
  const Image padded = kernels::pad(g, m - 1 - o, o, m - 1 - o, o, b);
  Image out(m, m);
  kernels::omp::correlate_grid(padded, r, out);
  return out;
}

std::pair<Image, Image> spatial_gradients(const Image& x) {
  if (x.height() < 2 || x.width() < 2) {
    throw DimensionError("spatial_gradients: image must be at least 2x2");
  }
  const int h = x.height();
  const int w = x.width();
  Image dx(h, w, 0.0);
  Image dy(h, w, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c + 1 < w; ++c) dx(r, c) = x(r, c + 1) - x(r, c);
  }
  for (int r = 0; r + 1 < h; ++r) {
    for (int c = 0; c < w; ++c) dy(r, c) = x(r + 1, c) - x(r, c);
  }
  return {std::move(dx), std::move(dy)};
}

std::pair<Image, Image> central_gradients(const Image& x) {
  if (x.height() < 2 || x.width() < 2) {
    throw DimensionError("central_gradients: image must be at least 2x2");
  }
  const int h = x.height();
  const int w = x.width();
  Image dx(h, w, 0.0);
  Image dy(h, w, 0.0);
  for (int r = 0; r < h; ++r) {
    const int up = std::max(r - 1, 0);
    const int down = std::min(r + 1, h - 1);
    for (int c = 0; c < w; ++c) {
      const int left = std::max(c - 1, 0);
      const int right = std::min(c + 1, w - 1);
      dx(r, c) = 0.5 * (x(r, right) - x(r, left));
      dy(r, c) = 0.5 * (x(down, c) - x(up, c));
    }
  }
  return {std::move(dx), std::move(dy)};
}

Image spatial_gradients_adjoint(const Image& gx, const Image& gy) {
  require_same_shape(gx, gy, "spatial_gradients_adjoint");
  const int h = gx.height();
  const int w = gx.width();
  Image out(h, w, 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c + 1 < w; ++c) {
      out(r, c + 1) += gx(r, c);
      out(r, c) -= gx(r, c);
    }
  }
  for (int r = 0; r + 1 < h; ++r) {
    for (int c = 0; c < w; ++c) {
      out(r + 1, c) += gy(r, c);
      out(r, c) -= gy(r, c);
    }
  }
  return out;
}

Image gaussian_filter(const Image& x, double sigma, Boundary b) {
  if (!(sigma > 0.0)) return x;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    taps[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    total += taps[k + radius];
  }
  for (double& t : taps) t /= total;
  return separable(x, taps, b);
}

Image box_filter(const Image& x, int radius, Boundary b) {
  if (radius <= 0) return x;
  std::vector<double> taps(2 * radius + 1, 1.0 / (2 * radius + 1));
  return separable(x, taps, b);
}

}  // namespace pldeconv
