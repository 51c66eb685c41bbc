#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

namespace tpsr {

enum class SkipMode { kAdd, kConcat };

struct GeneratorConfig {
  int n_residual_blocks = 16;
  int base_channels = 64;
  int scale = 4;  // power of two; one ×2 sub-pixel block per factor of 2
  int outer_kernel = 9;
  int residual_kernel = 3;
  SkipMode skip = SkipMode::kAdd;

  int upsample_blocks() const;
  void validate() const;
  nlohmann::json to_json() const;
  static GeneratorConfig from_json(const nlohmann::json& j);
  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

struct DiscriminatorConfig {
  std::vector<int> channels = {64, 64, 128, 128, 256, 256, 512, 512};  // strides alternate 1, 2
  double leaky_slope = 0.2;
  int dense_width = 1024;
  int input_size = 96;

  int feature_size() const;  // spatial side after the strided convolutions
  void validate() const;
  nlohmann::json to_json() const;
  static DiscriminatorConfig from_json(const nlohmann::json& j);
  friend bool operator==(const DiscriminatorConfig&, const DiscriminatorConfig&) = default;
};

// BatchNorm running statistics keep 0.9 of the previous value per update.
inline constexpr double kBatchNormMomentum = 0.1;

class ResidualBlockImpl : public torch::nn::Module {
 public:
  ResidualBlockImpl(int channels, int kernel);
  torch::Tensor forward(const torch::Tensor& x);

 private:
  torch::nn::Conv2d conv1_{nullptr}, conv2_{nullptr};
  torch::nn::BatchNorm2d bn1_{nullptr}, bn2_{nullptr};
};
TORCH_MODULE(ResidualBlock);

// conv9 + ReLU → residual blocks → conv3 + BN → skip with the first
// features → ×2 sub-pixel blocks → conv9. Output is linear while training
// and clamped to [0,1] in eval mode.
class GeneratorImpl : public torch::nn::Module {
 public:
  explicit GeneratorImpl(GeneratorConfig cfg = {});
  torch::Tensor forward(const torch::Tensor& lr);
  const GeneratorConfig& config() const { return cfg_; }

 private:
  GeneratorConfig cfg_;
  torch::nn::Conv2d head_{nullptr};
  torch::nn::Sequential body_{nullptr};
  torch::nn::Conv2d body_conv_{nullptr};
  torch::nn::BatchNorm2d body_bn_{nullptr};
  torch::nn::Sequential upsample_{nullptr};
  torch::nn::Conv2d tail_{nullptr};
};
TORCH_MODULE(Generator);

// Strided conv ladder with LeakyReLU, two dense layers and a sigmoid.
class DiscriminatorImpl : public torch::nn::Module {
 public:
  explicit DiscriminatorImpl(DiscriminatorConfig cfg = {});
  torch::Tensor forward(const torch::Tensor& img);  // [N,1] probabilities
  const DiscriminatorConfig& config() const { return cfg_; }

 private:
  DiscriminatorConfig cfg_;
  torch::nn::Sequential features_{nullptr};
  torch::nn::Linear dense1_{nullptr}, dense2_{nullptr};
};
TORCH_MODULE(Discriminator);

// He-uniform weights (bound sqrt(6 / fan_in)) for conv and dense layers,
// zero biases, BatchNorm scale 1 and shift 0. Deterministic per seed.
void init_params(torch::nn::Module& module, std::uint64_t seed);

std::int64_t count_parameters(const torch::nn::Module& module);

}  // namespace tpsr
