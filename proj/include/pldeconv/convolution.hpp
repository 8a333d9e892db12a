#pragma once

#include <utility>

#include "pldeconv/image.hpp"
#include "pldeconv/types.hpp"

namespace pldeconv {

/// (h * x)(i,j) = sum_{a,b} h(a,b) x(i - a + o, j - b + o), o = M/2, with
/// out-of-range samples supplied by the boundary rule. Output has the shape
/// of `x`. Throws DimensionError when the kernel is larger than the image.
Image convolve(const Image& x, const Kernel& h, Boundary b = Boundary::Symmetric);

/// Same as convolve() for an arbitrary square tap grid (not necessarily a
/// normalized kernel), e.g. an intermediate iterate.
Image convolve_grid(const Image& x, const Image& taps, Boundary b = Boundary::Symmetric);

/// Correlation of `r` with the kernel: out(i,j) = sum h(a,b) r(i + a - o, j + b - o).
/// The exact adjoint of convolve() with respect to the image under Circular.
Image correlate_image(const Image& r, const Image& taps, Boundary b = Boundary::Symmetric);

/// Gradient grid of <h * g, r> with respect to h, over an M x M support:
/// out(a,b) = sum_{i,j} r(i,j) g(i - a + o, j - b + o). This is the exact
/// adjoint of h -> convolve(g, h) for either boundary rule.
Image correlate(const Image& r, const Image& g, int kernel_size, Boundary b = Boundary::Symmetric);

/// Forward differences (horizontal, vertical); the last column of D_x and the
/// last row of D_y are zero.
std::pair<Image, Image> spatial_gradients(const Image& x);

/// Central differences (x[i+1] - x[i-1]) / 2 with edge samples repeated at the
/// border. Used by the rectilinear initializer.
std::pair<Image, Image> central_gradients(const Image& x);

/// Adjoint of spatial_gradients(): returns D_x^T gx + D_y^T gy.
Image spatial_gradients_adjoint(const Image& gx, const Image& gy);

/// Separable Gaussian smoothing with radius ceil(3 sigma). sigma <= 0 copies.
Image gaussian_filter(const Image& x, double sigma, Boundary b = Boundary::Symmetric);

/// (2r+1) x (2r+1) local mean. radius 0 copies.
Image box_filter(const Image& x, int radius, Boundary b = Boundary::Symmetric);

}  // namespace pldeconv
