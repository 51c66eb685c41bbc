#include "tpsr/patch.hpp"

#include <string>

#include "tpsr/resize.hpp"

namespace tpsr {

PatchPair sample_patch_pair(const ImageTensor& hr_image, const ObbLabel& obb, std::mt19937_64& rng, int patch_size,
                            int scale) {
  if (scale < 1 || patch_size < scale || patch_size % scale != 0) {
    throw DataError("patch size must be a positive multiple of the scale factor");
  }
  if (hr_image.height() != obb.height() || hr_image.width() != obb.width()) {
    throw DataError("OBB label is not aligned with its HR image");
  }
  if (hr_image.height() < patch_size || hr_image.width() < patch_size) {
    throw DataError("image " + std::to_string(hr_image.width()) + "x" + std::to_string(hr_image.height()) +
                    " is smaller than the " + std::to_string(patch_size) + "px patch");
  }
  const int rows = (hr_image.height() - patch_size) / scale;
  const int cols = (hr_image.width() - patch_size) / scale;
  std::uniform_int_distribution<int> pick_row(0, rows);
  std::uniform_int_distribution<int> pick_col(0, cols);
  const int y0 = pick_row(rng) * scale;
  const int x0 = pick_col(rng) * scale;

  PatchPair pair;
  pair.y0 = y0;
  pair.x0 = x0;
  pair.hr = hr_image.crop(y0, x0, patch_size, patch_size);
  pair.lr = resize_bicubic(pair.hr, {1.0 / scale, true});
  pair.obb = ObbLabel(patch_size, patch_size);
  for (int y = 0; y < patch_size; ++y) {
    for (int x = 0; x < patch_size; ++x) pair.obb(y, x) = obb(y0 + y, x0 + x);
  }
  return pair;
}

PatchPair sample_patch_pair(const ImageTensor& hr_image, const ObbLabel& obb, std::uint64_t seed, int patch_size,
                            int scale) {
  std::mt19937_64 rng(seed);
  return sample_patch_pair(hr_image, obb, rng, patch_size, scale);
}

}  // namespace tpsr
