#include "tpsr/resize.hpp"

#include <cmath>
#include <string>

namespace tpsr {

double cubic_kernel(double x) {
  const double ax = std::abs(x);
  const double ax2 = ax * ax;
  const double ax3 = ax2 * ax;
  if (ax <= 1.0) return 1.5 * ax3 - 2.5 * ax2 + 1.0;
  if (ax <= 2.0) return -0.5 * ax3 + 2.5 * ax2 - 4.0 * ax + 2.0;
  return 0.0;
}

int resized_extent(int in_size, double scale) {
  // Guard against products such as 0.1 * 30 = 3.0000000000000004.
  return static_cast<int>(std::ceil(static_cast<double>(in_size) * scale - 1e-9));
}

AxisWeights axis_weights(int in_size, int out_size, double scale, bool antialias) {
  if (in_size <= 0 || out_size <= 0) throw DataError("resize extents must be positive");
  const bool widen = antialias && scale < 1.0;
  const double kernel_width = widen ? 4.0 / scale : 4.0;
  const int taps = static_cast<int>(std::ceil(kernel_width)) + 2;

  AxisWeights w;
  w.in_size = in_size;
  w.out_size = out_size;
  w.indices.resize(static_cast<std::size_t>(out_size));
  w.weights.resize(static_cast<std::size_t>(out_size));

  const int period = 2 * in_size;
  for (int i = 0; i < out_size; ++i) {
    // 1-based coordinates, as in the reference implementation.
    const double u = (i + 1) / scale + 0.5 * (1.0 - 1.0 / scale);
    const int left = static_cast<int>(std::floor(u - kernel_width / 2.0));
    auto& idx = w.indices[static_cast<std::size_t>(i)];
    auto& wt = w.weights[static_cast<std::size_t>(i)];
    double sum = 0.0;
    for (int k = 0; k < taps; ++k) {
      const int j = left + k;
      const double d = u - j;
      const double h = widen ? scale * cubic_kernel(scale * d) : cubic_kernel(d);
      if (h == 0.0) continue;
      // Symmetric extension: ... 2 1 | 1 2 ... n | n n-1 ...
      int m = ((j - 1) % period + period) % period;
      if (m >= in_size) m = period - 1 - m;
      idx.push_back(m);
      wt.push_back(h);
      sum += h;
    }
    for (double& v : wt) v /= sum;
  }
  return w;
}

ImageTensor resize_bicubic(const ImageTensor& img, const ResizeSpec& spec) {
  if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) throw DataError("resize scale must be positive");
  if (img.empty()) throw DataError("cannot resize an empty image");
  const int out_h = resized_extent(img.height(), spec.scale);
  const int out_w = resized_extent(img.width(), spec.scale);
  if (out_h < 1 || out_w < 1) {
    throw DataError("degenerate resize output " + std::to_string(out_h) + "x" + std::to_string(out_w));
  }

  const AxisWeights rows = axis_weights(img.height(), out_h, spec.scale, spec.antialias);
  const AxisWeights cols = axis_weights(img.width(), out_w, spec.scale, spec.antialias);

  // Vertical pass into a double buffer, then horizontal pass.
  const int w_in = img.width();
  std::vector<double> tmp(static_cast<std::size_t>(out_h) * static_cast<std::size_t>(w_in) * 3, 0.0);
  for (int i = 0; i < out_h; ++i) {
    const auto& idx = rows.indices[static_cast<std::size_t>(i)];
    const auto& wt = rows.weights[static_cast<std::size_t>(i)];
    double* dst = tmp.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(w_in) * 3;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      for (int x = 0; x < w_in; ++x) {
        for (int c = 0; c < 3; ++c) dst[x * 3 + c] += wt[k] * img(idx[k], x, c);
      }
    }
  }

  ImageTensor out(out_h, out_w);
  for (int i = 0; i < out_h; ++i) {
    const double* src = tmp.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(w_in) * 3;
    for (int j = 0; j < out_w; ++j) {
      const auto& idx = cols.indices[static_cast<std::size_t>(j)];
      const auto& wt = cols.weights[static_cast<std::size_t>(j)];
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k) acc += wt[k] * src[idx[k] * 3 + c];
        out(i, j, c) = static_cast<float>(acc);
      }
    }
  }
  out.clamp();
  return out;
}

ImageTensor bicubic_degrade(const ImageTensor& hr, int factor) {
  if (factor < 1) throw DataError("degradation factor must be positive");
  return quantize_to_u8_grid(resize_bicubic(hr, {1.0 / factor, true}));
}

ImageTensor bicubic_round_trip(const ImageTensor& hr, int factor) {
  return quantize_to_u8_grid(resize_bicubic(bicubic_degrade(hr, factor), {static_cast<double>(factor), true}));
}

}  // namespace tpsr
