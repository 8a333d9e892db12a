#include "pldeconv/error.hpp"
#include "pldeconv/kernels.hpp"

namespace pldeconv::kernels {

int boundary_index(int i, int n, Boundary b) noexcept {
  if (b == Boundary::Circular) {
    const int m = i % n;
    return m < 0 ? m + n : m;
  }
  // Period 2n reflection handles margins wider than the image too.
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

Image pad(const Image& x, int top, int bottom, int left, int right, Boundary b) {
  if (top < 0 || bottom < 0 || left < 0 || right < 0) {
    throw DimensionError("pad: negative margin");
  }
  const int h = x.height();
  const int w = x.width();
  Image out(h + top + bottom, w + left + right);
  std::vector<int> cols(out.width());
  for (int c = 0; c < out.width(); ++c) cols[c] = boundary_index(c - left, w, b);
  for (int r = 0; r < out.height(); ++r) {
    const auto src = x.row(boundary_index(r - top, h, b));
    auto dst = out.row(r);
    for (int c = 0; c < out.width(); ++c) dst[c] = src[cols[c]];
  }
  return out;
}

}  // namespace pldeconv::kernels
