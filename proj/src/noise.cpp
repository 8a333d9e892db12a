#include "pldeconv/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pldeconv/convolution.hpp"
#include "pldeconv/error.hpp"

namespace pldeconv {

namespace {

constexpr double kInversionLimit = 30.0;

double sample_poisson(double mean, std::mt19937_64& rng,
                      std::uniform_real_distribution<double>& uniform,
                      std::normal_distribution<double>& normal) {
  if (mean <= 0.0) return 0.0;
  if (mean < kInversionLimit) {
    const double u = uniform(rng);
    double p = std::exp(-mean);
    double cdf = p;
    int k = 0;
    // The tail beyond 200 has probability far below double resolution for
    // means under 30.
    while (u > cdf && k < 200) {
      ++k;
      p *= mean / k;
      cdf += p;
    }
    return k;
  }
  const double v = std::round(mean + std::sqrt(mean) * normal(rng));
  return std::max(v, 0.0);
}

}  // namespace

Image poisson_forward(const Image& x, const NoiseParams& noise, std::uint64_t seed) {
  if (noise.sigma_read < 0.0) throw DomainError("sigma_read must be nonnegative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::normal_distribution<double> read(0.0, noise.sigma_read > 0.0 ? noise.sigma_read : 1.0);
  const double alpha = noise.alpha.value();

  Image y(x.height(), x.width());
  auto src = x.pixels();
  auto dst = y.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    double v = sample_poisson(alpha * src[i], rng, uniform, normal);
    if (noise.sigma_read > 0.0) v += read(rng);
    dst[i] = v;
  }
  return y;
}

double snr_db(double alpha, double x, double sigma) {
  const double signal = alpha * x;
  const double variance = signal + sigma * sigma;
  if (!(variance > 0.0)) {
    throw DomainError("snr_db: alpha*x + sigma^2 must be positive");
  }
  return 20.0 * std::log10(signal / std::sqrt(variance));
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw DomainError("percentile of empty range");
  if (p < 0.0 || p > 100.0) throw DomainError("percentile must lie in [0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

PhotonLevel estimate_photon_level(const Image& y, const PhotonHeuristicConfig& cfg) {
  if (y.empty()) throw DomainError("estimate_photon_level: empty observation");
  const double peak = max_value(y);
  if (!(peak > 0.0)) {
    throw DomainError("estimate_photon_level: observation has no positive counts");
  }
  const Image smooth = box_filter(y, cfg.smoothing_radius);
  double level = percentile(smooth.pixels(), cfg.percentile);
  if (!(level > 0.0)) level = peak;  // sparse photons: fall back to the brightest count
  return PhotonLevel(level);
}

}  // namespace pldeconv
