#pragma once

#include <cstdint>

#include "pldeconv/image.hpp"
#include "pldeconv/types.hpp"

namespace pldeconv {

/// Draws y_i ~ Poisson(alpha * x_i) + N(0, sigma_read^2) independently per
/// pixel. Raw values are returned (no clipping), so read noise can go
/// negative. Deterministic for a fixed seed.
///
/// Means below 30 are sampled by CDF inversion; larger means use the rounded
/// normal approximation.
Image poisson_forward(const Image& x, const NoiseParams& noise, std::uint64_t seed);

/// Signal-to-noise ratio of the Poisson-Gaussian pixel model in decibels:
/// 20 log10(alpha x / sqrt(alpha x + sigma^2)).
double snr_db(double alpha, double x, double sigma);

struct PhotonHeuristicConfig {
  double percentile = 99.0;
  /// Local-mean radius applied before taking the percentile; suppresses the
  /// upper tail of the shot noise itself. 0 uses raw counts.
  int smoothing_radius = 2;
};

/// Estimates alpha from an observation in photon counts as a high percentile
/// of the (locally averaged) counts, relying on max(x) ~ 1.
/// Throws DomainError for an empty or all-zero observation.
PhotonLevel estimate_photon_level(const Image& y, const PhotonHeuristicConfig& cfg = {});

/// Linear-interpolated percentile (the "linear" definition, rank p/100 (n-1)).
double percentile(std::span<const double> values, double p);

}  // namespace pldeconv
