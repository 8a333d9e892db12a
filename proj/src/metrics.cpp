#include "pldeconv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pldeconv/error.hpp"

namespace pldeconv {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;

// Valid-mode separable filtering: output is (h - n + 1) x (w - n + 1).
Image filter_valid(const Image& x, const std::vector<double>& taps) {
  const int n = static_cast<int>(taps.size());
  const int oh = x.height() - n + 1;
  const int ow = x.width() - n + 1;
  Image tmp(x.height(), ow);
  for (int r = 0; r < x.height(); ++r) {
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += taps[k] * x(r, c + k);
      tmp(r, c) = s;
    }
  }
  Image out(oh, ow);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += taps[k] * tmp(r + k, c);
      out(r, c) = s;
    }
  }
  return out;
}

Image product(const Image& a, const Image& b) {
  Image out(a.height(), a.width());
  auto pa = a.pixels();
  auto pb = b.pixels();
  auto po = out.pixels();
  for (std::size_t i = 0; i < po.size(); ++i) po[i] = pa[i] * pb[i];
  return out;
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak) {
  require_same_shape(a, b, "psnr");
  if (!(peak > 0.0)) throw DomainError("psnr: peak must be positive");
  const double mse = squared_distance(a, b) / static_cast<double>(a.size());
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b, "ssim");
  if (a.height() < kSsimWindow || a.width() < kSsimWindow) {
    throw DimensionError("ssim: images must be at least 11x11");
  }
  std::vector<double> taps(kSsimWindow);
  double total = 0.0;
  for (int k = 0; k < kSsimWindow; ++k) {
    const double d = k - kSsimWindow / 2;
    taps[k] = std::exp(-0.5 * d * d / (kSsimSigma * kSsimSigma));
    total += taps[k];
  }
  for (double& t : taps) t /= total;

  const double c1 = kSsimK1 * kSsimK1;
  const double c2 = kSsimK2 * kSsimK2;
  const Image mu_a = filter_valid(a, taps);
  const Image mu_b = filter_valid(b, taps);
  const Image aa = filter_valid(product(a, a), taps);
  const Image bb = filter_valid(product(b, b), taps);
  const Image ab = filter_valid(product(a, b), taps);

  double acc = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a.pixels()[i];
    const double mb = mu_b.pixels()[i];
    const double va = aa.pixels()[i] - ma * ma;
    const double vb = bb.pixels()[i] - mb * mb;
    const double cov = ab.pixels()[i] - ma * mb;
    acc += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return acc / static_cast<double>(mu_a.size());
}

double kernel_ncc(const Image& h1, const Image& h2) {
  require_same_shape(h1, h2, "kernel_ncc");
  const int rows = h1.height();
  const int cols = h1.width();
  const double n = static_cast<double>(h1.size());

  const double mean1 = sum(h1) / n;
  double var1 = 0.0;
  for (double v : h1.pixels()) var1 += (v - mean1) * (v - mean1);
  double var2_full = 0.0;
  const double mean2_full = sum(h2) / n;
  for (double v : h2.pixels()) var2_full += (v - mean2_full) * (v - mean2_full);
  if (max_value(h1) == min_value(h1) || max_value(h2) == min_value(h2)) {
    throw DomainError("kernel_ncc: zero-variance kernel");
  }

  double best = -std::numeric_limits<double>::infinity();
  for (int dr = -(rows - 1); dr < rows; ++dr) {
    for (int dc = -(cols - 1); dc < cols; ++dc) {
      // h2 shifted by (dr, dc): s(r,c) = h2(r - dr, c - dc), zero outside.
      double s_sum = 0.0;
      double s_sq = 0.0;
      double cross = 0.0;
      for (int r = std::max(0, dr); r < std::min(rows, rows + dr); ++r) {
        for (int c = std::max(0, dc); c < std::min(cols, cols + dc); ++c) {
          const double v = h2(r - dr, c - dc);
          s_sum += v;
          s_sq += v * v;
          cross += h1(r, c) * v;
        }
      }
      const double s_var = s_sq - s_sum * s_sum / n;
      if (s_var <= 1e-300) continue;
      const double cov = cross - mean1 * s_sum;
      best = std::max(best, cov / std::sqrt(var1 * s_var));
    }
  }
  return std::clamp(best, -1.0, 1.0);
}

double kernel_ncc(const Kernel& h1, const Kernel& h2) {
  return kernel_ncc(h1.grid(), h2.grid());
}

}  // namespace pldeconv
