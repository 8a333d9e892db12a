#pragma once

// Pixel-loop primitives shared by convolution, Richardson-Lucy and the
// kernel gradient. Each has an OpenMP implementation used by the library and
// a plain serial implementation kept as the reference for tests and the
// benchmark. Both sum every output in the same order, so their results are
// bitwise identical for any thread count.

#include "pldeconv/image.hpp"
#include "pldeconv/types.hpp"

namespace pldeconv::kernels {

/// Maps an out-of-range index onto [0, n) with the boundary rule.
/// Symmetric mirrors about the edge including the edge sample (x[-1] = x[0]).
int boundary_index(int i, int n, Boundary b) noexcept;

/// Extends `x` by the given margins.
Image pad(const Image& x, int top, int bottom, int left, int right, Boundary b);

namespace omp {

/// out(i,j) = sum_{a,b} taps(a,b) * padded(i + oa, j + ob), where
/// (oa, ob) = (M-1-a, M-1-b) if `flip` and (a, b) otherwise.
/// `out` must already have the output shape; it is overwritten.
void apply_taps(const Image& padded, const Image& taps, bool flip, Image& out);

/// out(a,b) = sum_{i,j} weights(i,j) * padded(i + M-1-a, j + M-1-b) for the
/// M x M `out`.
void correlate_grid(const Image& padded, const Image& weights, Image& out);

}  // namespace omp

namespace serial {

void apply_taps(const Image& padded, const Image& taps, bool flip, Image& out);
void correlate_grid(const Image& padded, const Image& weights, Image& out);

}  // namespace serial

}  // namespace pldeconv::kernels
