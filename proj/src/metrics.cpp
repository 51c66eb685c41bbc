#include "tpsr/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include <torch/torch.h>

#include "tpsr/error.hpp"

namespace tpsr {
namespace {

// Shaved, convention-converted planes in double precision.
struct Planes {
  int height = 0;
  int width = 0;
  std::vector<std::vector<double>> channels;
};

void check_pair(const ImageTensor& a, const ImageTensor& b, const MetricConvention& conv) {
  if (!a.same_shape(b)) throw DataError("metric inputs differ in size");
  if (conv.border_shave < 0 || 2 * conv.border_shave >= a.height() || 2 * conv.border_shave >= a.width()) {
    throw DataError("border shave must be smaller than half of each image dimension");
  }
}

Planes planes_of(const ImageTensor& img, const MetricConvention& conv) {
  const int s = conv.border_shave;
  Planes p;
  p.height = img.height() - 2 * s;
  p.width = img.width() - 2 * s;
  const int n = conv.color == ColorMode::kLuma ? 1 : 3;
  p.channels.assign(static_cast<std::size_t>(n),
                    std::vector<double>(static_cast<std::size_t>(p.height) * static_cast<std::size_t>(p.width)));
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(p.width) + static_cast<std::size_t>(x);
      if (n == 1) {
        p.channels[0][i] = 0.299 * img(y + s, x + s, 0) + 0.587 * img(y + s, x + s, 1) + 0.114 * img(y + s, x + s, 2);
      } else {
        for (int c = 0; c < 3; ++c) p.channels[static_cast<std::size_t>(c)][i] = img(y + s, x + s, c);
      }
    }
  }
  return p;
}

double psnr_from_mse(double mse, double range) {
  if (mse == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(range * range / mse);
}

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(size));
  const double center = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - center;
    w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += w[static_cast<std::size_t>(i)];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Separable 'valid' filtering of an H×W plane.
std::vector<double> filter_valid(const std::vector<double>& in, int h, int w, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int oh = h - n + 1;
  const int ow = w - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * static_cast<std::size_t>(ow));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int t = 0; t < n; ++t) acc += k[static_cast<std::size_t>(t)] * in[static_cast<std::size_t>(y * w + x + t)];
      tmp[static_cast<std::size_t>(y * ow + x)] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * static_cast<std::size_t>(ow));
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int t = 0; t < n; ++t) acc += k[static_cast<std::size_t>(t)] * tmp[static_cast<std::size_t>((y + t) * ow + x)];
      out[static_cast<std::size_t>(y * ow + x)] = acc;
    }
  }
  return out;
}

}  // namespace

ColorMode color_mode_from(const std::string& name) {
  if (name == "rgb") return ColorMode::kRgb;
  if (name == "luma" || name == "y") return ColorMode::kLuma;
  throw DataError("unknown color convention '" + name + "' (expected rgb or luma)");
}

const char* color_mode_name(ColorMode mode) { return mode == ColorMode::kRgb ? "rgb" : "luma"; }

double psnr(const ImageTensor& a, const ImageTensor& b, const MetricConvention& conv) {
  // One reduction for global and region scores, so a full mask reproduces
  // the global value bit for bit.
  check_pair(a, b, conv);
  return *masked_psnr(a, b, BinaryRaster(a.height(), a.width(), 1), conv);
}

double ssim(const ImageTensor& a, const ImageTensor& b, const MetricConvention& conv) {
  constexpr int kWindow = 11;
  check_pair(a, b, conv);
  const Planes pa = planes_of(a, conv);
  const Planes pb = planes_of(b, conv);
  if (pa.height < kWindow || pa.width < kWindow) throw DataError("image is smaller than the 11x11 SSIM window");

  const auto window = gaussian_window(kWindow, 1.5);
  const double c1 = std::pow(0.01 * conv.data_range, 2);
  const double c2 = std::pow(0.03 * conv.data_range, 2);
  const int h = pa.height;
  const int w = pa.width;

  double total = 0.0;
  for (std::size_t c = 0; c < pa.channels.size(); ++c) {
    const auto& x = pa.channels[c];
    const auto& y = pb.channels[c];
    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mu_x = filter_valid(x, h, w, window);
    const auto mu_y = filter_valid(y, h, w, window);
    const auto e_xx = filter_valid(xx, h, w, window);
    const auto e_yy = filter_valid(yy, h, w, window);
    const auto e_xy = filter_valid(xy, h, w, window);
    double sum = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
      const double mx = mu_x[i];
      const double my = mu_y[i];
      const double vx = e_xx[i] - mx * mx;
      const double vy = e_yy[i] - my * my;
      const double cov = e_xy[i] - mx * my;
      sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    total += sum / static_cast<double>(mu_x.size());
  }
  return total / static_cast<double>(pa.channels.size());
}

std::optional<double> masked_psnr(const ImageTensor& a, const ImageTensor& b, const BinaryRaster& mask,
                                  const MetricConvention& conv) {
  check_pair(a, b, conv);
  if (mask.height() != a.height() || mask.width() != a.width()) throw DataError("mask does not match image size");
  const Planes pa = planes_of(a, conv);
  const Planes pb = planes_of(b, conv);
  const int s = conv.border_shave;
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < pa.height; ++y) {
    for (int x = 0; x < pa.width; ++x) {
      if (mask(y + s, x + s) == 0) continue;
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(pa.width) + static_cast<std::size_t>(x);
      for (std::size_t c = 0; c < pa.channels.size(); ++c) {
        const double d = pa.channels[c][i] - pb.channels[c][i];
        sum += d * d;
        ++count;
      }
    }
  }
  if (count == 0) return std::nullopt;
  return psnr_from_mse(sum / static_cast<double>(count), conv.data_range);
}

RegionScores region_scores(const ImageTensor& sr, const ImageTensor& hr, const MaskSet& masks,
                           const MetricConvention& conv) {
  return {masked_psnr(sr, hr, masks.object, conv), masked_psnr(sr, hr, masks.background, conv),
          masked_psnr(sr, hr, masks.boundary, conv)};
}

nlohmann::json ThroughputReport::to_json() const {
  return {{"fps_median", fps_median},
          {"fps_mean", fps_mean},
          {"latency_ms_p50", latency_ms_p50},
          {"latency_ms_mean", latency_ms_mean},
          {"input_size", {input_width, input_height}},
          {"warmup", warmup},
          {"repeats", repeats}};
}

ThroughputReport benchmark_throughput(Generator& generator, int input_width, int input_height, int repeats,
                                      int warmup) {
  if (repeats < 1 || warmup < 0 || input_width < 1 || input_height < 1) {
    throw DataError("benchmark needs repeats >= 1, warmup >= 0 and a positive input size");
  }
  torch::NoGradGuard no_grad;
  generator->eval();
  auto gen = at::detail::createCPUGenerator(0);
  const auto input = torch::rand({1, 3, input_height, input_width}, gen);
  for (int i = 0; i < warmup; ++i) generator->forward(input);

  std::vector<double> latency_ms;
  latency_ms.reserve(static_cast<std::size_t>(repeats));
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = generator->forward(input);
    (void)out.data_ptr();
    const auto t1 = std::chrono::steady_clock::now();
    latency_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }

  std::vector<double> sorted = latency_ms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double mean_latency = 0.0;
  double mean_fps = 0.0;
  for (const double ms : latency_ms) {
    mean_latency += ms;
    mean_fps += 1000.0 / ms;
  }
  mean_latency /= static_cast<double>(n);
  mean_fps /= static_cast<double>(n);

  ThroughputReport r;
  r.latency_ms_p50 = median;
  r.latency_ms_mean = mean_latency;
  r.fps_median = 1000.0 / median;
  r.fps_mean = mean_fps;
  r.input_width = input_width;
  r.input_height = input_height;
  r.warmup = warmup;
  r.repeats = repeats;
  return r;
}

}  // namespace tpsr
