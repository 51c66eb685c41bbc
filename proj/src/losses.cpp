#include "tpsr/losses.hpp"

#include <cmath>

#include "tpsr/error.hpp"
#include "tpsr/tensor_convert.hpp"

namespace tpsr {
namespace {

void check_aligned(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  if (a.sizes() != b.sizes()) {
    throw DataError(std::string(what) + ": dimension mismatch " + c10::str(a.sizes()) + " vs " + c10::str(b.sizes()));
  }
}

void check_probabilities(const torch::Tensor& p) {
  const auto d = p.detach();
  if (d.isnan().any().item<bool>() || (d < 0).any().item<bool>() || (d > 1).any().item<bool>()) {
    throw RuntimeFailure("discriminator output outside [0,1]");
  }
}

}  // namespace

void LossWeights::validate() const {
  for (const double v : {alpha, beta, w_mse, w_adv}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("loss weights must be finite and >= 0");
  }
  if (gamma != 0.0) throw DataError("the object-region perceptual weight (gamma) must be 0");
}

nlohmann::json LossWeights::to_json() const {
  return {{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"w_mse", w_mse}, {"w_adv", w_adv}};
}

LossWeights LossWeights::from_json(const nlohmann::json& j) {
  LossWeights w;
  w.alpha = j.value("alpha", w.alpha);
  w.beta = j.value("beta", w.beta);
  w.gamma = j.value("gamma", w.gamma);
  w.w_mse = j.value("w_mse", w.w_mse);
  w.w_adv = j.value("w_adv", w.w_adv);
  return w;
}

MaskTensors MaskTensors::from_mask_sets(std::span<const MaskSet> masks, torch::ScalarType dtype) {
  if (masks.empty()) throw DataError("no masks given");
  std::vector<torch::Tensor> obj, bg, bd;
  for (const auto& m : masks) {
    obj.push_back(mask_to_tensor(m.object, dtype));
    bg.push_back(mask_to_tensor(m.background, dtype));
    bd.push_back(mask_to_tensor(m.boundary, dtype));
  }
  return {torch::cat(obj, 0), torch::cat(bg, 0), torch::cat(bd, 0)};
}

MaskTensors MaskTensors::to(torch::ScalarType dtype) const {
  return {object.to(dtype), background.to(dtype), boundary.to(dtype)};
}

void MaskTensors::check_partition() const {
  if (object.sizes() != background.sizes() || object.sizes() != boundary.sizes()) {
    throw DataError("region masks differ in shape");
  }
  const auto sum = object + background + boundary;
  if (!torch::equal(sum, torch::ones_like(sum))) throw DataError("region masks do not partition the frame");
}

torch::Tensor masked_feature_distance(const FeatureExtractor& fx, const torch::Tensor& sr, const torch::Tensor& hr,
                                      const torch::Tensor& mask, FeatureTap tap) {
  check_aligned(sr, hr, "masked_feature_distance");
  if (mask.dim() != 4 || mask.size(0) != sr.size(0) || mask.size(1) != 1 || mask.size(2) != sr.size(2) ||
      mask.size(3) != sr.size(3)) {
    throw DataError("masked_feature_distance: mask " + c10::str(mask.sizes()) + " does not match images " +
                    c10::str(sr.sizes()));
  }
  const auto m = mask.to(sr.scalar_type());
  torch::Tensor target;
  {
    torch::NoGradGuard no_grad;
    target = fx.extract(hr.detach() * m, tap);
  }
  const auto features = fx.extract(sr * m, tap);
  return (features - target).pow(2).mean();
}

PerceptualTerms targeted_perceptual_loss(const FeatureExtractor& fx, const torch::Tensor& sr, const torch::Tensor& hr,
                                         const MaskTensors& masks, const LossWeights& w) {
  w.validate();
  masks.check_partition();
  PerceptualTerms terms;
  terms.boundary = masked_feature_distance(fx, sr, hr, masks.boundary, kBoundaryTap);
  terms.background = masked_feature_distance(fx, sr, hr, masks.background, kBackgroundTap);
  // The object term carries weight 0 and contributes nothing.
  terms.weighted = w.alpha * terms.boundary + w.beta * terms.background;
  return terms;
}

torch::Tensor pixel_mse(const torch::Tensor& sr, const torch::Tensor& hr) {
  check_aligned(sr, hr, "pixel_mse");
  return (sr - hr).pow(2).mean();
}

torch::Tensor adversarial_g(const torch::Tensor& d_out_fake) {
  check_probabilities(d_out_fake);
  return -torch::log(d_out_fake.clamp(kProbEpsilon, 1.0 - kProbEpsilon)).mean();
}

torch::Tensor adversarial_d(const torch::Tensor& d_out_real, const torch::Tensor& d_out_fake) {
  check_probabilities(d_out_real);
  check_probabilities(d_out_fake);
  const auto real = d_out_real.clamp(kProbEpsilon, 1.0 - kProbEpsilon);
  const auto fake = d_out_fake.clamp(kProbEpsilon, 1.0 - kProbEpsilon);
  return (-torch::log(real)).mean() + (-torch::log(1.0 - fake)).mean();
}

double combine(const LossReport& c, const LossWeights& w) {
  return w.w_mse * c.mse + w.w_adv * c.adv_g + w.alpha * c.perc_boundary + w.beta * c.perc_background;
}

GeneratorObjective total_generator_loss(const FeatureExtractor& fx, const torch::Tensor& sr, const torch::Tensor& hr,
                                        const MaskTensors& masks, const torch::Tensor& d_out_fake,
                                        const LossWeights& w) {
  const auto mse = pixel_mse(sr, hr);
  const auto adv = adversarial_g(d_out_fake);
  const auto perc = targeted_perceptual_loss(fx, sr, hr, masks, w);

  GeneratorObjective out;
  out.total = w.w_mse * mse + w.w_adv * adv.to(mse.scalar_type()) + perc.weighted;
  out.report.mse = mse.item<double>();
  out.report.adv_g = adv.item<double>();
  out.report.perc_boundary = perc.boundary.item<double>();
  out.report.perc_background = perc.background.item<double>();
  out.report.total = combine(out.report, w);
  return out;
}

}  // namespace tpsr
