#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "tpsr/image.hpp"

namespace tpsr {

enum class FeatureTap { kRelu1_2, kRelu2_2, kRelu4_1, kRelu4_3 };

inline constexpr std::array<FeatureTap, 4> kAllTaps = {FeatureTap::kRelu1_2, FeatureTap::kRelu2_2,
                                                        FeatureTap::kRelu4_1, FeatureTap::kRelu4_3};

std::string_view tap_name(FeatureTap tap);
FeatureTap tap_from_name(std::string_view name);
int tap_channels(FeatureTap tap);
// Total spatial downsampling before the tap (1, 2, 8, 8).
int tap_downsampling(FeatureTap tap);
// Side length of the input window seen by one unit at the tap.
int receptive_field(FeatureTap tap);

// One 3×3 convolution of the VGG-16 prefix up to conv4_3.
struct VggConvSpec {
  std::string name;  // "conv1_1" ... "conv4_3"
  int in_channels;
  int out_channels;
  bool pool_before;  // a 2×2 max-pool precedes this convolution
};
const std::vector<VggConvSpec>& vgg16_prefix();

enum class ExtractorMode { kPretrained, kSurrogate };

// Frozen VGG-16 feature stack (up to relu4_3). Inputs are [N,3,H,W] RGB in
// [0,1]; ImageNet mean/std normalization is applied internally.
// Immutable after construction; concurrent extract() calls are safe.
class FeatureExtractor {
 public:
  // Same topology as VGG-16 with seeded random weights.
  static FeatureExtractor surrogate(std::uint64_t seed);
  // Weight archive with tensors "<conv>.weight" [out,in,3,3] and
  // "<conv>.bias" [out]; mismatches are reported per layer.
  static FeatureExtractor pretrained(const std::filesystem::path& archive);
  // The names/shapes a pretrained archive must provide.
  static nlohmann::json expected_manifest();

  ExtractorMode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  std::string describe() const;

  torch::Tensor extract(const torch::Tensor& images, FeatureTap tap) const;
  torch::Tensor extract(const ImageTensor& img, FeatureTap tap) const;

  const torch::Tensor& weight(std::size_t layer) const { return weights_.at(layer); }
  const torch::Tensor& bias(std::size_t layer) const { return biases_.at(layer); }
  std::size_t layer_count() const { return weights_.size(); }

  // CRC over every parameter; changes iff a weight changes.
  std::uint32_t fingerprint() const;
  void save(const std::filesystem::path& path) const;

  static constexpr std::array<double, 3> kMean = {0.485, 0.456, 0.406};
  static constexpr std::array<double, 3> kStd = {0.229, 0.224, 0.225};

 private:
  FeatureExtractor() = default;

  ExtractorMode mode_ = ExtractorMode::kSurrogate;
  std::uint64_t seed_ = 0;
  std::string source_;
  std::vector<torch::Tensor> weights_;
  std::vector<torch::Tensor> biases_;
};

}  // namespace tpsr
