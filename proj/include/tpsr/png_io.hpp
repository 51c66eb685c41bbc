#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace tpsr::png {

// Raw decoded PNG samples. Palette and sub-byte images are expanded to
// 8 bits; 16-bit samples are kept as-is.
struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;   // 1 (gray), 2 (gray+alpha), 3 (RGB) or 4 (RGBA)
  int bit_depth = 0;  // 8 or 16
  std::vector<std::uint16_t> samples;  // interleaved, row-major
};

Decoded read(const std::filesystem::path& path);

// Writes an 8-bit PNG with 1 (gray) or 3 (RGB) channels.
void write_u8(const std::filesystem::path& path, int width, int height, int channels,
              const std::vector<std::uint8_t>& samples);

}  // namespace tpsr::png
