#pragma once

#include "pldeconv/image.hpp"
#include "pldeconv/types.hpp"

namespace pldeconv {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrCap = 99.0;

/// 10 log10(peak^2 / MSE), capped at kPsnrCap.
double psnr(const Image& a, const Image& b, double peak = 1.0);

/// Mean SSIM over all valid 11x11 windows, Gaussian-weighted (sigma 1.5),
/// k1 = 0.01, k2 = 0.03, dynamic range 1.
double ssim(const Image& a, const Image& b);

/// Maximum Pearson correlation between `h1` and `h2` translated by any integer
/// 2-D shift (vacated pixels filled with zero). Insensitive to the translation
/// ambiguity of blind deconvolution. Throws DomainError for a constant kernel.
double kernel_ncc(const Image& h1, const Image& h2);
double kernel_ncc(const Kernel& h1, const Kernel& h2);

}  // namespace pldeconv
