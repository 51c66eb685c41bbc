#include "tpsr/tensor_convert.hpp"

#include <cstring>
#include <vector>

namespace tpsr {

torch::Tensor to_tensor(const ImageTensor& img, torch::ScalarType dtype) {
  auto hwc = torch::from_blob(const_cast<float*>(img.values().data()), {img.height(), img.width(), 3},
                              torch::TensorOptions().dtype(torch::kFloat32));
  return hwc.permute({2, 0, 1}).unsqueeze(0).to(dtype).contiguous().clone();
}

torch::Tensor to_batch(std::span<const ImageTensor> images, torch::ScalarType dtype) {
  if (images.empty()) throw DataError("cannot build an empty image batch");
  std::vector<torch::Tensor> parts;
  parts.reserve(images.size());
  for (const auto& img : images) {
    if (!img.same_shape(images.front())) throw DataError("batch images differ in shape");
    parts.push_back(to_tensor(img, dtype));
  }
  return torch::cat(parts, 0);
}

ImageTensor from_tensor(const torch::Tensor& t) {
  auto chw = t.dim() == 4 ? t.squeeze(0) : t;
  if (chw.dim() != 3 || chw.size(0) != 3) throw DataError("expected a [3,H,W] or [1,3,H,W] tensor");
  const auto hwc = chw.detach().to(torch::kCPU, torch::kFloat32).permute({1, 2, 0}).contiguous();
  ImageTensor img(static_cast<int>(hwc.size(0)), static_cast<int>(hwc.size(1)));
  std::memcpy(img.values().data(), hwc.data_ptr<float>(), img.size() * sizeof(float));
  return img;
}

torch::Tensor mask_to_tensor(const BinaryRaster& mask, torch::ScalarType dtype) {
  auto t = torch::empty({1, 1, mask.height(), mask.width()}, torch::kFloat32);
  auto* out = t.data_ptr<float>();
  const auto values = mask.values();
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] != 0 ? 1.0f : 0.0f;
  return t.to(dtype);
}

}  // namespace tpsr
