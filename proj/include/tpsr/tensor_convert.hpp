#pragma once

#include <span>

#include <torch/torch.h>

#include "tpsr/image.hpp"
#include "tpsr/raster.hpp"

namespace tpsr {

// [1,3,H,W] tensor of the requested dtype.
torch::Tensor to_tensor(const ImageTensor& img, torch::ScalarType dtype = torch::kFloat32);
// [N,3,H,W]; all images must share one shape.
torch::Tensor to_batch(std::span<const ImageTensor> images, torch::ScalarType dtype = torch::kFloat32);
// Accepts [3,H,W] or [1,3,H,W].
ImageTensor from_tensor(const torch::Tensor& t);

// [1,1,H,W] tensor with values {0,1}.
torch::Tensor mask_to_tensor(const BinaryRaster& mask, torch::ScalarType dtype = torch::kFloat32);

}  // namespace tpsr
