#pragma once

// Random fixtures and brute-force reference implementations. The references
// are written from the mathematical definitions with plain loops and do not
// call into the library beyond the container types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "pldeconv/image.hpp"
#include "pldeconv/types.hpp"

namespace testing {

using pldeconv::Boundary;
using pldeconv::Image;

inline Image random_image(int h, int w, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Image x(h, w);
  for (double& v : x.pixels()) v = u(rng);
  return x;
}

inline pldeconv::Kernel random_kernel(int m, std::uint64_t seed) {
  Image g = random_image(m, m, seed, 0.0, 1.0);
  double s = 0.0;
  for (double v : g.pixels()) s += v;
  for (double& v : g.pixels()) v /= s;
  return pldeconv::Kernel::project(g);
}

inline int wrap(int i, int n, Boundary b) {
  if (b == Boundary::Circular) return ((i % n) + n) % n;
  // Mirror including the edge sample, repeated until inside.
  while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
  return i;
}

/// out(i,j) = sum_ab h(a,b) x(i + o - a, j + o - b), o = M/2.
inline Image ref_convolve(const Image& x, const Image& h, Boundary b) {
  const int m = h.height();
  const int o = m / 2;
  Image out(x.height(), x.width());
  for (int i = 0; i < x.height(); ++i) {
    for (int j = 0; j < x.width(); ++j) {
      double s = 0.0;
      for (int a = 0; a < m; ++a) {
        for (int c = 0; c < m; ++c) {
          s += h(a, c) * x(wrap(i + o - a, x.height(), b), wrap(j + o - c, x.width(), b));
        }
      }
      out(i, j) = s;
    }
  }
  return out;
}

/// Kernel-shaped adjoint: out(a,b) = sum_ij r(i,j) x(i + o - a, j + o - b).
inline Image ref_correlate(const Image& r, const Image& x, int m, Boundary b) {
  const int o = m / 2;
  Image out(m, m);
  for (int a = 0; a < m; ++a) {
    for (int c = 0; c < m; ++c) {
      double s = 0.0;
      for (int i = 0; i < r.height(); ++i) {
        for (int j = 0; j < r.width(); ++j) {
          s += r(i, j) * x(wrap(i + o - a, x.height(), b), wrap(j + o - c, x.width(), b));
        }
      }
      out(a, c) = s;
    }
  }
  return out;
}

inline double ref_dot(const Image& a, const Image& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.pixels()[i] * b.pixels()[i];
  return s;
}

inline double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
  }
  return m;
}

/// Pearson correlation of two equally sized grids after shifting `b` by
/// (dr, dc) with zero fill.
inline double shifted_pearson(const Image& a, const Image& b, int dr, int dc) {
  const int m = a.height();
  Image s(m, m, 0.0);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const int rr = r - dr;
      const int cc = c - dc;
      if (rr >= 0 && rr < m && cc >= 0 && cc < m) s(r, c) = b(rr, cc);
    }
  }
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a.pixels()[i];
    mb += s.pixels()[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a.pixels()[i] - ma;
    const double db = s.pixels()[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return -std::numeric_limits<double>::infinity();
  return sab / std::sqrt(saa * sbb);
}

inline double ref_kernel_ncc(const Image& a, const Image& b) {
  const int m = a.height();
  double best = -std::numeric_limits<double>::infinity();
  for (int dr = -(m - 1); dr <= m - 1; ++dr) {
    for (int dc = -(m - 1); dc <= m - 1; ++dc) best = std::max(best, shifted_pearson(a, b, dr, dc));
  }
  return best;
}

/// Straightforward SSIM: every valid 11x11 window, normalized Gaussian
/// weights with sigma 1.5, biased weighted moments.
inline double ref_ssim(const Image& a, const Image& b) {
  constexpr int kWin = 11;
  double w[kWin][kWin];
  double total = 0.0;
  for (int i = 0; i < kWin; ++i) {
    for (int j = 0; j < kWin; ++j) {
      const double di = i - 5;
      const double dj = j - 5;
      w[i][j] = std::exp(-(di * di + dj * dj) / (2 * 1.5 * 1.5));
      total += w[i][j];
    }
  }
  const double c1 = 0.01 * 0.01;
  const double c2 = 0.03 * 0.03;
  double acc = 0.0;
  int windows = 0;
  for (int r = 0; r + kWin <= a.height(); ++r) {
    for (int c = 0; c + kWin <= a.width(); ++c) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int i = 0; i < kWin; ++i) {
        for (int j = 0; j < kWin; ++j) {
          const double k = w[i][j] / total;
          const double x = a(r + i, c + j);
          const double y = b(r + i, c + j);
          mx += k * x;
          my += k * y;
          sxx += k * x * x;
          syy += k * y * y;
          sxy += k * x * y;
        }
      }
      const double vx = sxx - mx * mx;
      const double vy = syy - my * my;
      const double cxy = sxy - mx * my;
      acc += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++windows;
    }
  }
  return acc / windows;
}

}  // namespace testing
