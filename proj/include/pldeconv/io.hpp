#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pldeconv/estimation.hpp"

namespace pldeconv::io {

namespace fs = std::filesystem;

/// Grayscale portable float map ("Pf"). Samples are stored as 32-bit floats,
/// bottom row first. Writing always uses little-endian (negative scale token).
/// Reading honors either byte order and rejects non-finite samples.
Image read_pfm(const fs::path& path);
void write_pfm(const fs::path& path, const Image& x);

/// Binary graymap ("P5"). Pixels are quantized as round(x / peak * maxval),
/// clipped to [0, maxval]; 16-bit samples are big-endian.
void write_pgm(const fs::path& path, const Image& x, double peak = 1.0, int maxval = 255);
/// Returns samples divided by maxval (the [0, 1] scale).
Image read_pgm(const fs::path& path);

/// {"k": K, "points": [[x, y], ...]}
nlohmann::json keypoints_to_json(const KeyPoints& z);
KeyPoints keypoints_from_json(const nlohmann::json& j);
KeyPoints read_keypoints_json(const fs::path& path);
void write_keypoints_json(const fs::path& path, const KeyPoints& z);

/// First line M, then M rows of M values with 17 significant digits.
/// Reading rejects kernels whose sum deviates from one by more than 1e-6.
Kernel read_kernel_text(const fs::path& path);
void write_kernel_text(const fs::path& path, const Kernel& h);

inline constexpr double kKernelReadTolerance = 1e-6;

/// Columns stage,iteration,loss,step_size.
void write_trace_csv(const fs::path& path, const std::vector<TraceEntry>& stage1,
                     const std::vector<TraceEntry>& stage2);

/// Full configuration bundle. The oracle denoiser image is not serialized;
/// it is recorded as {"kind": "oracle"} and must be supplied separately.
nlohmann::json config_to_json(const EstimateConfig& cfg);
/// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
EstimateConfig config_from_json(const nlohmann::json& j, EstimateConfig base = {});

struct DatasetManifest {
  int count = 0;
  int keypoints = 0;
  std::uint64_t seed = 0;
  double scale = 0.3;
  RenderConfig render;
};

nlohmann::json manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);

/// Writes kernel_NNNNNN.txt per record, keypoints.jsonl (one record per line)
/// and manifest.json into `dir`, creating it if needed.
void write_kernel_dataset(const fs::path& dir, const DatasetManifest& manifest,
                          const std::vector<KernelSample>& samples);

std::string kernel_filename(int index);

}  // namespace pldeconv::io
