#pragma once

#include <cstdint>
#include <random>

#include "tpsr/image.hpp"
#include "tpsr/obb.hpp"

namespace tpsr {

inline constexpr int kScaleFactor = 4;
inline constexpr int kHrPatchSize = 96;

struct PatchPair {
  ImageTensor hr;
  ImageTensor lr;
  ObbLabel obb;
  int y0 = 0;
  int x0 = 0;
};

// Crops an aligned HR/OBB window whose offset lies on the scale-factor grid
// and derives the LR patch with the antialiased bicubic downscale.
PatchPair sample_patch_pair(const ImageTensor& hr_image, const ObbLabel& obb, std::mt19937_64& rng,
                            int patch_size = kHrPatchSize, int scale = kScaleFactor);

PatchPair sample_patch_pair(const ImageTensor& hr_image, const ObbLabel& obb, std::uint64_t seed,
                            int patch_size = kHrPatchSize, int scale = kScaleFactor);

}  // namespace tpsr
