#include "tpsr/networks.hpp"

#include <cmath>

#include "tpsr/error.hpp"

namespace tpsr {
namespace {

torch::nn::Conv2d make_conv(int in, int out, int kernel, int stride = 1) {
  return torch::nn::Conv2d(torch::nn::Conv2dOptions(in, out, kernel).stride(stride).padding(kernel / 2));
}

torch::nn::BatchNorm2d make_bn(int channels) {
  return torch::nn::BatchNorm2d(torch::nn::BatchNorm2dOptions(channels).momentum(kBatchNormMomentum));
}

const char* skip_name(SkipMode m) { return m == SkipMode::kAdd ? "add" : "concat"; }

SkipMode skip_from(const std::string& s) {
  if (s == "add") return SkipMode::kAdd;
  if (s == "concat") return SkipMode::kConcat;
  throw DataError("unknown skip mode '" + s + "' (expected add or concat)");
}

}  // namespace

int GeneratorConfig::upsample_blocks() const {
  int blocks = 0;
  for (int s = scale; s > 1; s /= 2) ++blocks;
  return blocks;
}

void GeneratorConfig::validate() const {
  if (scale < 1 || (scale & (scale - 1)) != 0) throw DataError("generator scale must be a power of two");
  if (n_residual_blocks < 0 || base_channels < 1 || outer_kernel < 1 || residual_kernel < 1 ||
      outer_kernel % 2 == 0 || residual_kernel % 2 == 0) {
    throw DataError("invalid generator configuration");
  }
}

nlohmann::json GeneratorConfig::to_json() const {
  return {{"n_residual_blocks", n_residual_blocks}, {"base_channels", base_channels}, {"scale", scale},
          {"outer_kernel", outer_kernel},           {"residual_kernel", residual_kernel}, {"skip", skip_name(skip)}};
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
  GeneratorConfig c;
  c.n_residual_blocks = j.value("n_residual_blocks", c.n_residual_blocks);
  c.base_channels = j.value("base_channels", c.base_channels);
  c.scale = j.value("scale", c.scale);
  c.outer_kernel = j.value("outer_kernel", c.outer_kernel);
  c.residual_kernel = j.value("residual_kernel", c.residual_kernel);
  c.skip = skip_from(j.value("skip", std::string("add")));
  return c;
}

int DiscriminatorConfig::feature_size() const {
  int side = input_size;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (i % 2 == 1) side = (side + 1) / 2;  // stride-2 conv, padding 1, kernel 3
  }
  return side;
}

void DiscriminatorConfig::validate() const {
  if (channels.empty() || input_size < 1 || dense_width < 1) throw DataError("invalid discriminator configuration");
}

nlohmann::json DiscriminatorConfig::to_json() const {
  return {{"channels", channels}, {"leaky_slope", leaky_slope}, {"dense_width", dense_width}, {"input_size", input_size}};
}

DiscriminatorConfig DiscriminatorConfig::from_json(const nlohmann::json& j) {
  DiscriminatorConfig c;
  c.channels = j.value("channels", c.channels);
  c.leaky_slope = j.value("leaky_slope", c.leaky_slope);
  c.dense_width = j.value("dense_width", c.dense_width);
  c.input_size = j.value("input_size", c.input_size);
  return c;
}

ResidualBlockImpl::ResidualBlockImpl(int channels, int kernel)
    : conv1_(register_module("conv1", make_conv(channels, channels, kernel))),
      conv2_(register_module("conv2", make_conv(channels, channels, kernel))),
      bn1_(register_module("bn1", make_bn(channels))),
      bn2_(register_module("bn2", make_bn(channels))) {}

torch::Tensor ResidualBlockImpl::forward(const torch::Tensor& x) {
  auto y = torch::relu(bn1_(conv1_(x)));
  y = bn2_(conv2_(y));
  return x + y;
}

GeneratorImpl::GeneratorImpl(GeneratorConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const int c = cfg_.base_channels;
  head_ = register_module("head", make_conv(3, c, cfg_.outer_kernel));
  body_ = register_module("body", torch::nn::Sequential());
  for (int i = 0; i < cfg_.n_residual_blocks; ++i) body_->push_back(ResidualBlock(c, cfg_.residual_kernel));
  body_conv_ = register_module("body_conv", make_conv(c, c, cfg_.residual_kernel));
  body_bn_ = register_module("body_bn", make_bn(c));

  upsample_ = register_module("upsample", torch::nn::Sequential());
  int in = cfg_.skip == SkipMode::kConcat ? 2 * c : c;
  for (int i = 0; i < cfg_.upsample_blocks(); ++i) {
    upsample_->push_back(make_conv(in, 4 * c, 3));
    upsample_->push_back(torch::nn::PixelShuffle(2));
    upsample_->push_back(torch::nn::ReLU());
    in = c;
  }
  tail_ = register_module("tail", make_conv(in, 3, cfg_.outer_kernel));
}

torch::Tensor GeneratorImpl::forward(const torch::Tensor& lr) {
  if (lr.dim() != 4 || lr.size(1) != 3) throw DataError("generator expects an [N,3,H,W] batch");
  const auto head = torch::relu(head_(lr));
  auto x = body_bn_(body_conv_(body_->forward(head)));
  x = cfg_.skip == SkipMode::kAdd ? x + head : torch::cat({x, head}, 1);
  auto out = tail_(upsample_->forward(x));
  if (!is_training()) out = out.clamp(0.0, 1.0);
  return out;
}

DiscriminatorImpl::DiscriminatorImpl(DiscriminatorConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  features_ = register_module("features", torch::nn::Sequential());
  int in = 3;
  for (std::size_t i = 0; i < cfg_.channels.size(); ++i) {
    const int stride = i % 2 == 0 ? 1 : 2;
    features_->push_back(make_conv(in, cfg_.channels[i], 3, stride));
    if (i > 0) features_->push_back(make_bn(cfg_.channels[i]));
    features_->push_back(torch::nn::LeakyReLU(torch::nn::LeakyReLUOptions().negative_slope(cfg_.leaky_slope)));
    in = cfg_.channels[i];
  }
  const int side = cfg_.feature_size();
  dense1_ = register_module("dense1", torch::nn::Linear(in * side * side, cfg_.dense_width));
  dense2_ = register_module("dense2", torch::nn::Linear(cfg_.dense_width, 1));
}

torch::Tensor DiscriminatorImpl::forward(const torch::Tensor& img) {
  if (img.dim() != 4 || img.size(1) != 3 || img.size(2) != cfg_.input_size || img.size(3) != cfg_.input_size) {
    throw DataError("discriminator expects [N,3," + std::to_string(cfg_.input_size) + "," +
                    std::to_string(cfg_.input_size) + "] input, got " + c10::str(img.sizes()));
  }
  auto x = features_->forward(img).flatten(1);
  x = torch::leaky_relu(dense1_(x), cfg_.leaky_slope);
  return torch::sigmoid(dense2_(x));
}

void init_params(torch::nn::Module& module, std::uint64_t seed) {
  auto gen = at::detail::createCPUGenerator(seed);
  torch::NoGradGuard no_grad;
  for (auto& item : module.named_modules()) {
    auto& m = *item.value();
    if (auto* conv = m.as<torch::nn::Conv2d>()) {
      const double fan_in = static_cast<double>(conv->weight.numel() / conv->weight.size(0));
      const double bound = std::sqrt(6.0 / fan_in);
      conv->weight.uniform_(-bound, bound, gen);
      if (conv->bias.defined()) conv->bias.zero_();
    } else if (auto* linear = m.as<torch::nn::Linear>()) {
      const double bound = std::sqrt(6.0 / static_cast<double>(linear->weight.size(1)));
      linear->weight.uniform_(-bound, bound, gen);
      linear->bias.zero_();
    } else if (auto* bn = m.as<torch::nn::BatchNorm2d>()) {
      bn->weight.fill_(1.0);
      bn->bias.zero_();
      bn->running_mean.zero_();
      bn->running_var.fill_(1.0);
      bn->num_batches_tracked.zero_();
    }
  }
}

std::int64_t count_parameters(const torch::nn::Module& module) {
  std::int64_t n = 0;
  for (const auto& p : module.parameters()) n += p.numel();
  return n;
}

}  // namespace tpsr
