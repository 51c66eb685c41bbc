#include "tpsr/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include "tpsr/error.hpp"

namespace tpsr::png {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void on_warning(png_structp, png_const_charp) {}

void on_error(png_structp png_ptr, png_const_charp msg) {
  auto* buffer = static_cast<std::string*>(png_get_error_ptr(png_ptr));
  if (buffer != nullptr) *buffer = msg;
  png_longjmp(png_ptr, 1);
}

// Decoding happens in a function with only trivially destructible locals
// between setjmp and any longjmp.
bool decode(std::FILE* file, Decoded& out, std::string& error) {
  png_structp png_ptr = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, on_error, on_warning);
  if (png_ptr == nullptr) {
    error = "cannot allocate png read struct";
    return false;
  }
  png_infop info_ptr = png_create_info_struct(png_ptr);
  if (info_ptr == nullptr) {
    png_destroy_read_struct(&png_ptr, nullptr, nullptr);
    error = "cannot allocate png info struct";
    return false;
  }
  if (setjmp(png_jmpbuf(png_ptr))) {
    png_destroy_read_struct(&png_ptr, &info_ptr, nullptr);
    return false;
  }

  png_init_io(png_ptr, file);
  png_read_info(png_ptr, info_ptr);

  const int color_type = png_get_color_type(png_ptr, info_ptr);
  const int depth = png_get_bit_depth(png_ptr, info_ptr);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png_ptr);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png_ptr);
  if (png_get_valid(png_ptr, info_ptr, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png_ptr);
  if (depth == 16) png_set_swap(png_ptr);  // host (little-endian) order for uint16 reads
  png_set_interlace_handling(png_ptr);
  png_read_update_info(png_ptr, info_ptr);

  out.width = static_cast<int>(png_get_image_width(png_ptr, info_ptr));
  out.height = static_cast<int>(png_get_image_height(png_ptr, info_ptr));
  out.channels = png_get_channels(png_ptr, info_ptr);
  out.bit_depth = png_get_bit_depth(png_ptr, info_ptr);

  const std::size_t rowbytes = png_get_rowbytes(png_ptr, info_ptr);
  std::vector<png_byte> raw(rowbytes * static_cast<std::size_t>(out.height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) rows[static_cast<std::size_t>(y)] = raw.data() + rowbytes * static_cast<std::size_t>(y);
  png_read_image(png_ptr, rows.data());
  png_read_end(png_ptr, nullptr);
  png_destroy_read_struct(&png_ptr, &info_ptr, nullptr);

  const std::size_t count = static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height) *
                            static_cast<std::size_t>(out.channels);
  out.samples.resize(count);
  if (out.bit_depth == 16) {
    for (std::size_t i = 0; i < count; ++i) {
      out.samples[i] = static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) out.samples[i] = raw[i];
  }
  return true;
}

bool encode(std::FILE* file, int width, int height, int channels, const std::uint8_t* samples,
            std::string& error) {
  png_structp png_ptr = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, on_error, on_warning);
  if (png_ptr == nullptr) {
    error = "cannot allocate png write struct";
    return false;
  }
  png_infop info_ptr = png_create_info_struct(png_ptr);
  if (info_ptr == nullptr) {
    png_destroy_write_struct(&png_ptr, nullptr);
    error = "cannot allocate png info struct";
    return false;
  }
  if (setjmp(png_jmpbuf(png_ptr))) {
    png_destroy_write_struct(&png_ptr, &info_ptr);
    return false;
  }
  png_init_io(png_ptr, file);
  png_set_compression_level(png_ptr, 6);
  png_set_IHDR(png_ptr, info_ptr, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png_ptr, info_ptr);
  const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  for (int y = 0; y < height; ++y) {
    png_write_row(png_ptr, samples + stride * static_cast<std::size_t>(y));
  }
  png_write_end(png_ptr, nullptr);
  png_destroy_write_struct(&png_ptr, &info_ptr);
  return true;
}

}  // namespace

Decoded read(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open image '" + path.string() + "'");

  png_byte signature[8] = {};
  if (std::fread(signature, 1, sizeof(signature), file.get()) != sizeof(signature) ||
      png_sig_cmp(signature, 0, sizeof(signature)) != 0) {
    throw DataError("'" + path.string() + "' is not a PNG file");
  }
  std::rewind(file.get());

  Decoded out;
  std::string error;
  if (!decode(file.get(), out, error)) {
    throw DataError("cannot decode PNG '" + path.string() + "': " + error);
  }
  return out;
}

void write_u8(const std::filesystem::path& path, int width, int height, int channels,
              const std::vector<std::uint8_t>& samples) {
  if (channels != 1 && channels != 3) throw DataError("PNG writer supports 1 or 3 channels");
  if (width <= 0 || height <= 0) throw DataError("cannot write an empty PNG to '" + path.string() + "'");
  if (samples.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                            static_cast<std::size_t>(channels)) {
    throw DataError("sample buffer does not match PNG dimensions for '" + path.string() + "'");
  }
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot write '" + path.string() + "'");
  std::string error;
  if (!encode(file.get(), width, height, channels, samples.data(), error)) {
    throw IoError("cannot encode PNG '" + path.string() + "': " + error);
  }
  if (std::fflush(file.get()) != 0) throw IoError("cannot flush '" + path.string() + "'");
}

}  // namespace tpsr::png
