#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "tpsr/raster.hpp"

namespace tpsr {

// H×W×3 RGB raster with interleaved channels and values nominally in [0,1].
class ImageTensor {
 public:
  static constexpr int kChannels = 3;

  ImageTensor() = default;
  ImageTensor(int height, int width, float fill = 0.0f);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return kChannels; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float& operator()(int y, int x, int c) { return data_[index(y, x, c)]; }
  float operator()(int y, int x, int c) const { return data_[index(y, x, c)]; }

  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  bool same_shape(const ImageTensor& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  // True when every element is finite and inside [0,1].
  bool is_normalized() const;
  ImageTensor& clamp();

  ImageTensor crop(int y0, int x0, int height, int width) const;

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
               kChannels +
           static_cast<std::size_t>(c);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

// Decodes an 8- or 16-bit grayscale/RGB PNG into [0,1]. Grayscale is
// replicated across the three channels.
ImageTensor load_image(const std::filesystem::path& path);

// Clamps to [0,1], quantizes with round-half-away-from-zero and writes an
// 8-bit RGB PNG.
void save_image(const ImageTensor& img, const std::filesystem::path& path);

// 8-bit quantization used by save_image: round(clamp(v, 0, 1) * 255).
std::uint8_t quantize_u8(float v);

// Quantize every element to the 8-bit grid and back, as a PNG round trip would.
ImageTensor quantize_to_u8_grid(const ImageTensor& img);

// ITU-R BT.601 luma, 0.299 R + 0.587 G + 0.114 B.
ScalarRaster rgb_to_luma(const ImageTensor& img);

}  // namespace tpsr
