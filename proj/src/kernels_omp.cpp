#include <omp.h>

#include <vector>

#include "pldeconv/kernels.hpp"

namespace pldeconv::kernels::omp {

namespace {

struct Tap {
  int row_offset;
  int col_offset;
  double weight;
};

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr long kParallelThreshold = 1L << 16;

}  // namespace

void apply_taps(const Image& padded, const Image& taps, bool flip, Image& out) {
  const int m = taps.height();
  std::vector<Tap> nonzero;
  nonzero.reserve(taps.size());
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      // Zero taps contribute +0.0 in the reference; skipping them keeps the
      // per-pixel sum bitwise identical.
      if (taps(a, b) != 0.0) {
        nonzero.push_back({flip ? m - 1 - a : a, flip ? m - 1 - b : b, taps(a, b)});
      }
    }
  }
  const int rows = out.height();
  const int cols = out.width();
  const long work = static_cast<long>(rows) * cols * static_cast<long>(nonzero.size());

#pragma omp parallel for schedule(static) if (work > kParallelThreshold)
  for (int i = 0; i < rows; ++i) {
    double* dst = out.row(i).data();
    for (int j = 0; j < cols; ++j) dst[j] = 0.0;
    for (const Tap& t : nonzero) {
      const double* src = padded.row(i + t.row_offset).data() + t.col_offset;
      const double w = t.weight;
      for (int j = 0; j < cols; ++j) dst[j] += w * src[j];
    }
  }
}

void correlate_grid(const Image& padded, const Image& weights, Image& out) {
  const int m = out.height();
  const int rows = weights.height();
  const int cols = weights.width();
  const long work = static_cast<long>(m) * m * rows * cols;

#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      double s = 0.0;
      for (int i = 0; i < rows; ++i) {
        const double* w = weights.row(i).data();
        const double* src = padded.row(i + m - 1 - a).data() + (m - 1 - b);
        for (int j = 0; j < cols; ++j) s += w[j] * src[j];
      }
      out(a, b) = s;
    }
  }
}

}  // namespace pldeconv::kernels::omp
