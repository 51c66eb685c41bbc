#pragma once

#include <limits>
#include <optional>
#include <string>

#include <json.hpp>

#include "tpsr/image.hpp"
#include "tpsr/networks.hpp"
#include "tpsr/obb.hpp"

namespace tpsr {

enum class ColorMode { kRgb, kLuma };

struct MetricConvention {
  ColorMode color = ColorMode::kRgb;
  int border_shave = 4;
  double data_range = 1.0;
};

ColorMode color_mode_from(const std::string& name);
const char* color_mode_name(ColorMode mode);

// PSNR of identical inputs.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

double psnr(const ImageTensor& a, const ImageTensor& b, const MetricConvention& conv = {});

// Mean SSIM over the shaved image: 11×11 Gaussian window (σ = 1.5),
// k1 = 0.01, k2 = 0.03, valid-region filtering, averaged over channels.
double ssim(const ImageTensor& a, const ImageTensor& b, const MetricConvention& conv = {});

// PSNR restricted to pixels where `mask` is 1 (after shaving). Empty
// regions yield nullopt.
std::optional<double> masked_psnr(const ImageTensor& a, const ImageTensor& b, const BinaryRaster& mask,
                                  const MetricConvention& conv = {});

struct RegionScores {
  std::optional<double> object;
  std::optional<double> background;
  std::optional<double> boundary;
};

RegionScores region_scores(const ImageTensor& sr, const ImageTensor& hr, const MaskSet& masks,
                           const MetricConvention& conv = {});

inline constexpr int kBenchmarkWarmup = 5;

struct ThroughputReport {
  double fps_median = 0.0;
  double fps_mean = 0.0;
  double latency_ms_p50 = 0.0;
  double latency_ms_mean = 0.0;
  int input_width = 0;
  int input_height = 0;
  int warmup = kBenchmarkWarmup;
  int repeats = 0;

  nlohmann::json to_json() const;
};

// Times `repeats` eval-mode forward passes on a random LR input after
// `warmup` untimed passes.
ThroughputReport benchmark_throughput(Generator& generator, int input_width, int input_height, int repeats,
                                      int warmup = kBenchmarkWarmup);

}  // namespace tpsr
