#include "pldeconv/kernels.hpp"

namespace pldeconv::kernels::serial {

void apply_taps(const Image& padded, const Image& taps, bool flip, Image& out) {
  const int m = taps.height();
  for (int i = 0; i < out.height(); ++i) {
    for (int j = 0; j < out.width(); ++j) {
      double s = 0.0;
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          const int oa = flip ? m - 1 - a : a;
          const int ob = flip ? m - 1 - b : b;
          s += taps(a, b) * padded(i + oa, j + ob);
        }
      }
      out(i, j) = s;
    }
  }
}

void correlate_grid(const Image& padded, const Image& weights, Image& out) {
  const int m = out.height();
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      double s = 0.0;
      for (int i = 0; i < weights.height(); ++i) {
        for (int j = 0; j < weights.width(); ++j) {
          s += weights(i, j) * padded(i + m - 1 - a, j + m - 1 - b);
        }
      }
      out(a, b) = s;
    }
  }
}

}  // namespace pldeconv::kernels::serial
