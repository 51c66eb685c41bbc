#pragma once

// Shared fixtures for the test binaries.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <zlib.h>

#include "tpsr/image.hpp"
#include "tpsr/obb.hpp"

namespace testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "tpsr") {
    std::random_device rd;
    path_ = fs::temp_directory_path() / (tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline tpsr::ImageTensor random_image(int h, int w, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  tpsr::ImageTensor img(h, w);
  for (float& v : img.values()) v = u(rng);
  return img;
}

// Random piecewise-constant label: a base class overpainted with random
// rectangles, plus a sprinkling of single-pixel noise.
inline tpsr::ClassIdRaster random_class_ids(int h, int w, int classes, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> cls(0, classes - 1);
  tpsr::ClassIdRaster ids(h, w, cls(rng));
  const int rects = std::uniform_int_distribution<int>(0, 6)(rng);
  for (int r = 0; r < rects; ++r) {
    const int y0 = std::uniform_int_distribution<int>(0, h - 1)(rng);
    const int x0 = std::uniform_int_distribution<int>(0, w - 1)(rng);
    const int y1 = std::uniform_int_distribution<int>(y0, h - 1)(rng);
    const int x1 = std::uniform_int_distribution<int>(x0, w - 1)(rng);
    const int c = cls(rng);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) ids(y, x) = c;
  }
  const int specks = std::uniform_int_distribution<int>(0, h * w / 50)(rng);
  for (int s = 0; s < specks; ++s) {
    ids(std::uniform_int_distribution<int>(0, h - 1)(rng), std::uniform_int_distribution<int>(0, w - 1)(rng)) =
        cls(rng);
  }
  return ids;
}

// Taxonomy with ids 0..5: sky, grass(plant), person, dirt(ground), car, sea(water).
inline std::shared_ptr<const tpsr::ClassTaxonomy> small_taxonomy() {
  return std::make_shared<const tpsr::ClassTaxonomy>(std::map<std::int32_t, tpsr::ClassInfo>{
      {0, {"sky", "sky"}},
      {1, {"grass", "plant"}},
      {2, {"person", "person"}},
      {3, {"dirt", "ground"}},
      {4, {"car", "vehicle"}},
      {5, {"sea", "water"}},
  });
}

inline std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Minimal PNG encoder for fixtures the library itself never writes
// (16-bit samples, gray+alpha). samples are big-endian per PNG when 16-bit.
inline void write_raw_png(const fs::path& path, int width, int height, int color_type, int bit_depth,
                          const std::vector<std::uint8_t>& rows_without_filter_bytes) {
  auto be32 = [](std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
  };
  std::vector<std::uint8_t> file = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  auto chunk = [&](const char* type, const std::vector<std::uint8_t>& data) {
    be32(file, static_cast<std::uint32_t>(data.size()));
    std::vector<std::uint8_t> body(type, type + 4);
    body.insert(body.end(), data.begin(), data.end());
    file.insert(file.end(), body.begin(), body.end());
    be32(file, static_cast<std::uint32_t>(crc32(0, body.data(), static_cast<uInt>(body.size()))));
  };
  std::vector<std::uint8_t> ihdr;
  be32(ihdr, static_cast<std::uint32_t>(width));
  be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.insert(ihdr.end(), {static_cast<std::uint8_t>(bit_depth), static_cast<std::uint8_t>(color_type), 0, 0, 0});
  chunk("IHDR", ihdr);
  const std::size_t row = rows_without_filter_bytes.size() / static_cast<std::size_t>(height);
  std::vector<std::uint8_t> raw;
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), rows_without_filter_bytes.begin() + static_cast<std::ptrdiff_t>(y * row),
               rows_without_filter_bytes.begin() + static_cast<std::ptrdiff_t>((y + 1) * row));
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> z(len);
  compress(z.data(), &len, raw.data(), static_cast<uLong>(raw.size()));
  z.resize(len);
  chunk("IDAT", z);
  chunk("IEND", {});
  std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(file.data()),
                                              static_cast<std::streamsize>(file.size()));
}

}  // namespace testing
