#include "tpsr/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tpsr/png_io.hpp"

namespace tpsr {

ImageTensor::ImageTensor(int height, int width, float fill) : height_(height), width_(width) {
  if (height < 0 || width < 0) throw DataError("image dimensions must be non-negative");
  data_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * kChannels, fill);
}

bool ImageTensor::is_normalized() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v) && v >= 0.0f && v <= 1.0f; });
}

ImageTensor& ImageTensor::clamp() {
  for (float& v : data_) v = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 1.0f);
  return *this;
}

ImageTensor ImageTensor::crop(int y0, int x0, int height, int width) const {
  if (y0 < 0 || x0 < 0 || height < 0 || width < 0 || y0 + height > height_ || x0 + width > width_) {
    throw DataError("crop window exceeds image bounds");
  }
  ImageTensor out(height, width);
  for (int y = 0; y < height; ++y) {
    const auto src = data_.begin() + static_cast<std::ptrdiff_t>(index(y0 + y, x0, 0));
    std::copy(src, src + static_cast<std::ptrdiff_t>(width) * kChannels, out.data_.begin() + static_cast<std::ptrdiff_t>(out.index(y, 0, 0)));
  }
  return out;
}

ImageTensor load_image(const std::filesystem::path& path) {
  const png::Decoded decoded = png::read(path);
  if (decoded.channels != 1 && decoded.channels != 3) {
    throw DataError("unsupported channel layout in '" + path.string() + "': " +
                    std::to_string(decoded.channels) + " channels (expected grayscale or RGB)");
  }
  const float scale = decoded.bit_depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
  ImageTensor img(decoded.height, decoded.width);
  auto out = img.values();
  if (decoded.channels == 3) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(decoded.samples[i]) * scale;
  } else {
    for (std::size_t i = 0; i < decoded.samples.size(); ++i) {
      const float v = static_cast<float>(decoded.samples[i]) * scale;
      out[3 * i] = out[3 * i + 1] = out[3 * i + 2] = v;
    }
  }
  return img;
}

std::uint8_t quantize_u8(float v) {
  const float c = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::round(static_cast<double>(c) * 255.0));
}

ImageTensor quantize_to_u8_grid(const ImageTensor& img) {
  ImageTensor out = img;
  for (float& v : out.values()) v = static_cast<float>(quantize_u8(v)) / 255.0f;
  return out;
}

void save_image(const ImageTensor& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> samples(img.size());
  const auto in = img.values();
  std::transform(in.begin(), in.end(), samples.begin(), quantize_u8);
  png::write_u8(path, img.width(), img.height(), 3, samples);
}

ScalarRaster rgb_to_luma(const ImageTensor& img) {
  ScalarRaster out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out(y, x) = 0.299f * img(y, x, 0) + 0.587f * img(y, x, 1) + 0.114f * img(y, x, 2);
    }
  }
  return out;
}

}  // namespace tpsr
