#include "tpsr/features.hpp"

#include <cmath>
#include <zlib.h>

#include "tpsr/error.hpp"
#include "tpsr/tensor_archive.hpp"
#include "tpsr/tensor_convert.hpp"

namespace tpsr {
namespace {

// Index of the convolution whose ReLU is the tap.
std::size_t tap_layer(FeatureTap tap) {
  switch (tap) {
    case FeatureTap::kRelu1_2: return 1;
    case FeatureTap::kRelu2_2: return 3;
    case FeatureTap::kRelu4_1: return 7;
    case FeatureTap::kRelu4_3: return 9;
  }
  throw DataError("unknown feature tap");
}

}  // namespace

std::string_view tap_name(FeatureTap tap) {
  switch (tap) {
    case FeatureTap::kRelu1_2: return "relu1_2";
    case FeatureTap::kRelu2_2: return "relu2_2";
    case FeatureTap::kRelu4_1: return "relu4_1";
    case FeatureTap::kRelu4_3: return "relu4_3";
  }
  return "unknown";
}

FeatureTap tap_from_name(std::string_view name) {
  for (const auto tap : kAllTaps) {
    if (tap_name(tap) == name) return tap;
  }
  throw DataError("unknown feature tap '" + std::string(name) + "'");
}

int tap_channels(FeatureTap tap) { return vgg16_prefix()[tap_layer(tap)].out_channels; }

int tap_downsampling(FeatureTap tap) {
  int factor = 1;
  const auto& layers = vgg16_prefix();
  for (std::size_t i = 0; i <= tap_layer(tap); ++i) {
    if (layers[i].pool_before) factor *= 2;
  }
  return factor;
}

int receptive_field(FeatureTap tap) {
  // r grows by (k-1)·jump per layer; each pool adds (2-1)·jump and doubles the jump.
  int field = 1;
  int jump = 1;
  const auto& layers = vgg16_prefix();
  for (std::size_t i = 0; i <= tap_layer(tap); ++i) {
    if (layers[i].pool_before) {
      field += jump;
      jump *= 2;
    }
    field += 2 * jump;
  }
  return field;
}

const std::vector<VggConvSpec>& vgg16_prefix() {
  static const std::vector<VggConvSpec> layers = {
      {"conv1_1", 3, 64, false},    {"conv1_2", 64, 64, false},   {"conv2_1", 64, 128, true},
      {"conv2_2", 128, 128, false}, {"conv3_1", 128, 256, true},  {"conv3_2", 256, 256, false},
      {"conv3_3", 256, 256, false}, {"conv4_1", 256, 512, true},  {"conv4_2", 512, 512, false},
      {"conv4_3", 512, 512, false},
  };
  return layers;
}

FeatureExtractor FeatureExtractor::surrogate(std::uint64_t seed) {
  FeatureExtractor fx;
  fx.mode_ = ExtractorMode::kSurrogate;
  fx.seed_ = seed;
  fx.source_ = "surrogate(seed=" + std::to_string(seed) + ")";
  auto gen = at::detail::createCPUGenerator(seed);
  torch::NoGradGuard no_grad;
  for (const auto& layer : vgg16_prefix()) {
    const double fan_in = layer.in_channels * 9.0;
    const double bound = std::sqrt(6.0 / fan_in);
    auto w = torch::empty({layer.out_channels, layer.in_channels, 3, 3}, torch::kFloat32);
    w.uniform_(-bound, bound, gen);
    auto b = torch::empty({layer.out_channels}, torch::kFloat32);
    b.uniform_(-0.05, 0.05, gen);
    fx.weights_.push_back(w);
    fx.biases_.push_back(b);
  }
  return fx;
}

FeatureExtractor FeatureExtractor::pretrained(const std::filesystem::path& path) {
  const TensorArchive archive = TensorArchive::load(path);
  FeatureExtractor fx;
  fx.mode_ = ExtractorMode::kPretrained;
  fx.source_ = "pretrained(" + path.string() + ")";
  for (const auto& layer : vgg16_prefix()) {
    const std::string wname = layer.name + ".weight";
    const std::string bname = layer.name + ".bias";
    if (!archive.contains(wname) || !archive.contains(bname)) {
      throw DataError("VGG weight archive '" + path.string() + "' is missing layer " + layer.name);
    }
    const auto& w = archive.at(wname);
    const auto& b = archive.at(bname);
    const std::vector<std::int64_t> wshape = {layer.out_channels, layer.in_channels, 3, 3};
    if (w.sizes().vec() != wshape || b.sizes().vec() != std::vector<std::int64_t>{layer.out_channels}) {
      throw DataError("VGG layer " + layer.name + " has shape " + c10::str(w.sizes()) + "/" + c10::str(b.sizes()) +
                      ", expected " + c10::str(c10::IntArrayRef(wshape)) + "/[" +
                      std::to_string(layer.out_channels) + "]");
    }
    fx.weights_.push_back(w.to(torch::kFloat32).clone());
    fx.biases_.push_back(b.to(torch::kFloat32).clone());
  }
  return fx;
}

nlohmann::json FeatureExtractor::expected_manifest() {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : vgg16_prefix()) {
    layers.push_back({{"name", layer.name + ".weight"},
                      {"shape", {layer.out_channels, layer.in_channels, 3, 3}}});
    layers.push_back({{"name", layer.name + ".bias"}, {"shape", {layer.out_channels}}});
  }
  nlohmann::json taps = nlohmann::json::object();
  for (const auto tap : kAllTaps) {
    taps[std::string(tap_name(tap))] = {{"channels", tap_channels(tap)},
                                        {"downsampling", tap_downsampling(tap)},
                                        {"receptive_field", receptive_field(tap)}};
  }
  return {{"architecture", "vgg16-prefix-to-relu4_3"},
          {"input", "RGB in [0,1], normalized internally with ImageNet mean/std"},
          {"tensors", std::move(layers)},
          {"taps", std::move(taps)}};
}

std::string FeatureExtractor::describe() const { return source_; }

torch::Tensor FeatureExtractor::extract(const torch::Tensor& images, FeatureTap tap) const {
  if (images.dim() != 4 || images.size(1) != 3) throw DataError("extract expects an [N,3,H,W] tensor");
  const int factor = tap_downsampling(tap);
  if (images.size(2) < factor || images.size(3) < factor) {
    throw DataError("image " + std::to_string(images.size(3)) + "x" + std::to_string(images.size(2)) +
                    " is too small for tap " + std::string(tap_name(tap)));
  }
  const auto opts = images.options();
  const auto mean = torch::tensor(std::vector<double>(kMean.begin(), kMean.end()), opts).view({1, 3, 1, 1});
  const auto stdev = torch::tensor(std::vector<double>(kStd.begin(), kStd.end()), opts).view({1, 3, 1, 1});
  auto x = (images - mean) / stdev;

  const auto& layers = vgg16_prefix();
  const std::size_t last = tap_layer(tap);
  for (std::size_t i = 0; i <= last; ++i) {
    if (layers[i].pool_before) {
      x = torch::max_pool2d(x, {2, 2}, {2, 2}, {0, 0}, {1, 1}, /*ceil_mode=*/true);
    }
    const auto& w = weights_[i].scalar_type() == images.scalar_type() ? weights_[i] : weights_[i].to(images.scalar_type());
    const auto& b = biases_[i].scalar_type() == images.scalar_type() ? biases_[i] : biases_[i].to(images.scalar_type());
    x = torch::relu(torch::conv2d(x, w, b, /*stride=*/1, /*padding=*/1));
  }
  return x;
}

torch::Tensor FeatureExtractor::extract(const ImageTensor& img, FeatureTap tap) const {
  torch::NoGradGuard no_grad;
  return extract(to_tensor(img), tap).squeeze(0);
}

std::uint32_t FeatureExtractor::fingerprint() const {
  uLong crc = crc32(0L, Z_NULL, 0);
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    for (const auto* t : {&weights_[i], &biases_[i]}) {
      const std::uint32_t part = tensor_crc(*t);
      crc = crc32(crc, reinterpret_cast<const Bytef*>(&part), sizeof(part));
    }
  }
  return static_cast<std::uint32_t>(crc);
}

void FeatureExtractor::save(const std::filesystem::path& path) const {
  TensorArchive archive("vgg16-features");
  archive.meta()["source"] = source_;
  const auto& layers = vgg16_prefix();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    archive.add(layers[i].name + ".weight", weights_[i]);
    archive.add(layers[i].name + ".bias", biases_[i]);
  }
  archive.save(path);
}

}  // namespace tpsr
