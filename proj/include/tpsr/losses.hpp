#pragma once

#include <json.hpp>
#include <torch/torch.h>

#include "tpsr/features.hpp"
#include "tpsr/obb.hpp"

namespace tpsr {

// Loss term weights. gamma weights the object-region perceptual term, which
// is not defined and must stay 0.
struct LossWeights {
  double alpha = 2e-6;    // boundary term, relu2_2
  double beta = 1.5e-6;   // background term, relu4_3
  double gamma = 0.0;     // object term
  double w_mse = 1.0;
  double w_adv = 1e-3;

  void validate() const;
  nlohmann::json to_json() const;
  static LossWeights from_json(const nlohmann::json& j);
};

struct LossReport {
  double total = 0.0;
  double mse = 0.0;
  double adv_g = 0.0;
  double perc_boundary = 0.0;
  double perc_background = 0.0;
};

// Clamp applied to discriminator probabilities inside the log terms.
inline constexpr double kProbEpsilon = 1e-7;

inline constexpr FeatureTap kBoundaryTap = FeatureTap::kRelu2_2;
inline constexpr FeatureTap kBackgroundTap = FeatureTap::kRelu4_3;

// Region masks as [N,1,H,W] tensors with values {0,1}.
struct MaskTensors {
  torch::Tensor object;
  torch::Tensor background;
  torch::Tensor boundary;

  static MaskTensors from_mask_sets(std::span<const MaskSet> masks, torch::ScalarType dtype = torch::kFloat32);
  MaskTensors to(torch::ScalarType dtype) const;
  // Throws DataError unless object + background + boundary == 1 everywhere.
  void check_partition() const;
};

// mean((φ(sr∘mask) − φ(hr∘mask))²) at the given tap. Masking happens in
// image space before feature extraction. Gradients flow to `sr` only.
torch::Tensor masked_feature_distance(const FeatureExtractor& fx, const torch::Tensor& sr, const torch::Tensor& hr,
                                      const torch::Tensor& mask, FeatureTap tap);

struct PerceptualTerms {
  torch::Tensor boundary;    // G_e, unweighted
  torch::Tensor background;  // G_b, unweighted
  torch::Tensor weighted;    // alpha·G_e + beta·G_b
};

PerceptualTerms targeted_perceptual_loss(const FeatureExtractor& fx, const torch::Tensor& sr, const torch::Tensor& hr,
                                         const MaskTensors& masks, const LossWeights& w);

torch::Tensor pixel_mse(const torch::Tensor& sr, const torch::Tensor& hr);

// mean(−log D(fake)), non-saturating generator loss.
torch::Tensor adversarial_g(const torch::Tensor& d_out_fake);
// mean(−log D(real) − log(1 − D(fake))).
torch::Tensor adversarial_d(const torch::Tensor& d_out_real, const torch::Tensor& d_out_fake);

struct GeneratorObjective {
  torch::Tensor total;  // differentiable
  LossReport report;
};

GeneratorObjective total_generator_loss(const FeatureExtractor& fx, const torch::Tensor& sr, const torch::Tensor& hr,
                                        const MaskTensors& masks, const torch::Tensor& d_out_fake,
                                        const LossWeights& w);

// The reported total, summed from the components in a fixed order.
double combine(const LossReport& components, const LossWeights& w);

}  // namespace tpsr
