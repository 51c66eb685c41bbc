#include "tpsr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "tpsr/error.hpp"
#include "tpsr/tensor_convert.hpp"

namespace tpsr {

void TrainSchedule::validate() const {
  if (pretrain_epochs < 0 || main_epochs < 0) throw DataError("epoch counts must be >= 0");
  if (!(lr0 >= 0.0) || !(decay_factor > 0.0) || decay_every < 1) throw DataError("invalid learning-rate schedule");
  if (batch_size < 1) throw DataError("batch size must be >= 1");
}

nlohmann::json TrainSchedule::to_json() const {
  return {{"pretrain_epochs", pretrain_epochs}, {"main_epochs", main_epochs}, {"lr0", lr0},
          {"decay_factor", decay_factor},       {"decay_every", decay_every}, {"batch_size", batch_size},
          {"seed", seed},                       {"adam_beta1", adam_beta1},   {"adam_beta2", adam_beta2},
          {"adam_eps", adam_eps}};
}

TrainSchedule TrainSchedule::from_json(const nlohmann::json& j) {
  TrainSchedule s;
  s.pretrain_epochs = j.value("pretrain_epochs", s.pretrain_epochs);
  s.main_epochs = j.value("main_epochs", s.main_epochs);
  s.lr0 = j.value("lr0", s.lr0);
  s.decay_factor = j.value("decay_factor", s.decay_factor);
  s.decay_every = j.value("decay_every", s.decay_every);
  s.batch_size = j.value("batch_size", s.batch_size);
  s.seed = j.value("seed", s.seed);
  s.adam_beta1 = j.value("adam_beta1", s.adam_beta1);
  s.adam_beta2 = j.value("adam_beta2", s.adam_beta2);
  s.adam_eps = j.value("adam_eps", s.adam_eps);
  return s;
}

double lr_at(const TrainSchedule& schedule, int epoch) {
  if (epoch < 0) throw DataError("epoch must be >= 0");
  return schedule.lr0 * std::pow(schedule.decay_factor, epoch / schedule.decay_every);
}

const char* phase_name(Phase phase) { return phase == Phase::kPretrain ? "pretrain" : "adversarial"; }

Phase phase_at(const TrainSchedule& schedule, int epoch) {
  return epoch < schedule.pretrain_epochs ? Phase::kPretrain : Phase::kAdversarial;
}

std::shared_ptr<const FeatureExtractor> ExtractorSpec::build() const {
  if (mode == ExtractorMode::kPretrained) {
    return std::make_shared<const FeatureExtractor>(FeatureExtractor::pretrained(weights_path));
  }
  return std::make_shared<const FeatureExtractor>(FeatureExtractor::surrogate(seed));
}

nlohmann::json ExtractorSpec::to_json() const {
  if (mode == ExtractorMode::kPretrained) return {{"mode", "pretrained"}, {"weights", weights_path}};
  return {{"mode", "surrogate"}, {"seed", seed}};
}

ExtractorSpec ExtractorSpec::from_json(const nlohmann::json& j) {
  ExtractorSpec s;
  const auto mode = j.value("mode", std::string("surrogate"));
  if (mode == "pretrained") {
    s.mode = ExtractorMode::kPretrained;
    s.weights_path = j.value("weights", std::string{});
  } else if (mode == "surrogate") {
    s.seed = j.value("seed", std::uint64_t{0});
  } else {
    throw DataError("unknown extractor mode '" + mode + "'");
  }
  return s;
}

void TrainConfig::validate() const {
  schedule.validate();
  weights.validate();
  generator.validate();
  discriminator.validate();
  if (patch_size % generator.scale != 0) throw DataError("patch size must be a multiple of the scale factor");
  if (patch_size != discriminator.input_size) throw DataError("patch size must equal the discriminator input size");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"schedule", schedule.to_json()},
          {"weights", weights.to_json()},
          {"generator", generator.to_json()},
          {"discriminator", discriminator.to_json()},
          {"extractor", extractor.to_json()},
          {"patch_size", patch_size}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.schedule = TrainSchedule::from_json(j.value("schedule", nlohmann::json::object()));
  c.weights = LossWeights::from_json(j.value("weights", nlohmann::json::object()));
  c.generator = GeneratorConfig::from_json(j.value("generator", nlohmann::json::object()));
  c.discriminator = DiscriminatorConfig::from_json(j.value("discriminator", nlohmann::json::object()));
  c.extractor = ExtractorSpec::from_json(j.value("extractor", nlohmann::json::object()));
  c.patch_size = j.value("patch_size", c.patch_size);
  return c;
}

Batch make_batch(std::span<const PatchPair> patches, std::vector<int> ids) {
  if (patches.empty()) throw DataError("cannot build an empty batch");
  std::vector<ImageTensor> lr, hr;
  std::vector<MaskSet> masks;
  for (const auto& p : patches) {
    lr.push_back(p.lr);
    hr.push_back(p.hr);
    masks.push_back(masks_from_obb(p.obb));
  }
  Batch b{to_batch(lr), to_batch(hr), MaskTensors::from_mask_sets(masks), std::move(ids)};
  if (b.ids.empty()) {
    b.ids.resize(patches.size());
    std::iota(b.ids.begin(), b.ids.end(), 0);
  }
  return b;
}

nlohmann::json StepRecord::to_json() const {
  return {{"step", step},
          {"epoch", epoch},
          {"phase", phase_name(phase)},
          {"total", report.total},
          {"mse", report.mse},
          {"adv_g", report.adv_g},
          {"adv_d", adv_d},
          {"perc_boundary", report.perc_boundary},
          {"perc_background", report.perc_background},
          {"lr", lr},
          {"d_step", discriminator_updated},
          {"d_real", d_real},
          {"d_fake", d_fake}};
}

Trainer::Trainer(TrainConfig cfg, std::shared_ptr<const FeatureExtractor> extractor)
    : cfg_(std::move(cfg)),
      extractor_(std::move(extractor)),
      generator_(cfg_.generator),
      discriminator_(cfg_.discriminator) {
  cfg_.validate();
  if (!extractor_) throw DataError("trainer needs a feature extractor");
  init_params(*generator_, cfg_.schedule.seed);
  init_params(*discriminator_, cfg_.schedule.seed + 1);
  const auto adam = [&] {
    return torch::optim::AdamOptions(cfg_.schedule.lr0)
        .betas({cfg_.schedule.adam_beta1, cfg_.schedule.adam_beta2})
        .eps(cfg_.schedule.adam_eps);
  };
  opt_g_ = std::make_unique<torch::optim::Adam>(generator_->parameters(), adam());
  opt_d_ = std::make_unique<torch::optim::Adam>(discriminator_->parameters(), adam());
  state_.rng.seed(cfg_.schedule.seed + 2);
  begin_epoch(0);
}

void Trainer::set_lr(double lr) {
  for (auto* opt : {opt_g_.get(), opt_d_.get()}) {
    for (auto& group : opt->param_groups()) static_cast<torch::optim::AdamOptions&>(group.options()).lr(lr);
  }
  state_.lr = lr;
}

void Trainer::begin_epoch(int epoch) {
  state_.epoch = epoch;
  state_.phase = phase_at(cfg_.schedule, epoch);
  state_.running_total = 0.0;
  state_.running_count = 0;
  set_lr(lr_at(cfg_.schedule, epoch));
}

void Trainer::check_batch(const Batch& batch) const {
  const auto& hr = batch.hr;
  if (batch.lr.size(0) != hr.size(0) || hr.size(2) != batch.lr.size(2) * cfg_.generator.scale ||
      hr.size(3) != batch.lr.size(3) * cfg_.generator.scale) {
    throw DataError("LR/HR batch sizes are inconsistent with the scale factor");
  }
  for (const auto* m : {&batch.masks.object, &batch.masks.background, &batch.masks.boundary}) {
    if (m->size(0) != hr.size(0) || m->size(2) != hr.size(2) || m->size(3) != hr.size(3)) {
      throw DataError("region masks are misaligned with the HR patches");
    }
  }
}

void Trainer::fail_non_finite(const char* what, const Batch& batch) const {
  std::ostringstream msg;
  msg << "non-finite " << what << " at step " << state_.step << " (epoch " << state_.epoch << ", lr " << state_.lr
      << ", batch ids [";
  for (std::size_t i = 0; i < batch.ids.size(); ++i) msg << (i ? "," : "") << batch.ids[i];
  msg << "])";
  throw RuntimeFailure(msg.str());
}

StepRecord Trainer::pretrain_step(const Batch& batch) {
  if (state_.phase != Phase::kPretrain) throw RuntimeFailure("pretrain_step called outside the pretraining phase");
  check_batch(batch);
  generator_->train();
  opt_g_->zero_grad();
  const auto sr = generator_->forward(batch.lr);
  const auto mse = pixel_mse(sr, batch.hr);
  const double mse_value = mse.item<double>();
  if (!std::isfinite(mse_value)) fail_non_finite("pixel MSE", batch);
  mse.backward();
  opt_g_->step();

  StepRecord rec;
  rec.step = ++state_.step;
  rec.epoch = state_.epoch;
  rec.phase = Phase::kPretrain;
  rec.lr = state_.lr;
  rec.report.mse = mse_value;
  rec.report.total = mse_value;
  state_.running_total += rec.report.total;
  ++state_.running_count;
  return rec;
}

StepRecord Trainer::adversarial_step(const Batch& batch, bool identity_probe) {
  if (state_.phase != Phase::kAdversarial) {
    throw RuntimeFailure("adversarial_step called during the pretraining phase");
  }
  check_batch(batch);
  generator_->train();
  discriminator_->train();

  auto sr = generator_->forward(batch.lr);
  if (identity_probe) sr = batch.hr + 0.0 * sr;

  opt_d_->zero_grad();
  const auto d_real = discriminator_->forward(batch.hr);
  const auto d_fake_detached = discriminator_->forward(sr.detach());
  const auto loss_d = adversarial_d(d_real, d_fake_detached);
  const double adv_d = loss_d.item<double>();
  if (!std::isfinite(adv_d)) fail_non_finite("discriminator loss", batch);
  loss_d.backward();
  opt_d_->step();

  opt_g_->zero_grad();
  const auto d_fake = discriminator_->forward(sr);
  const auto objective = total_generator_loss(*extractor_, sr, batch.hr, batch.masks, d_fake, cfg_.weights);
  if (!std::isfinite(objective.report.total)) fail_non_finite("generator loss", batch);
  objective.total.backward();
  opt_g_->step();

  StepRecord rec;
  rec.step = ++state_.step;
  rec.epoch = state_.epoch;
  rec.phase = Phase::kAdversarial;
  rec.lr = state_.lr;
  rec.report = objective.report;
  rec.adv_d = adv_d;
  rec.discriminator_updated = true;
  rec.d_real = d_real.mean().item<double>();
  rec.d_fake = d_fake_detached.mean().item<double>();
  state_.running_total += rec.report.total;
  ++state_.running_count;
  return rec;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint ckpt;
  ckpt.config = cfg_.to_json();
  ckpt.epoch = state_.epoch;
  ckpt.step = state_.step;
  std::ostringstream rng;
  rng << state_.rng;
  ckpt.rng_state = rng.str();
  store_module(ckpt.tensors, "generator", *generator_);
  store_module(ckpt.tensors, "discriminator", *discriminator_);
  store_adam(ckpt.tensors, "adam_g", *opt_g_, *generator_);
  store_adam(ckpt.tensors, "adam_d", *opt_d_, *discriminator_);
  return ckpt;
}

void Trainer::restore(const Checkpoint& ckpt) {
  const auto expected = cfg_.to_json();
  if (ckpt.config != expected) {
    std::string keys;
    for (const auto& op : nlohmann::json::diff(ckpt.config, expected)) {
      keys += (keys.empty() ? "" : ", ") + op.value("path", std::string{});
    }
    throw DataError("checkpoint configuration differs from the requested run at: " + keys);
  }
  restore_module(ckpt.tensors, "generator", *generator_);
  restore_module(ckpt.tensors, "discriminator", *discriminator_);
  restore_adam(ckpt.tensors, "adam_g", *opt_g_, *generator_);
  restore_adam(ckpt.tensors, "adam_d", *opt_d_, *discriminator_);
  std::istringstream rng(ckpt.rng_state);
  rng >> state_.rng;
  if (!rng) throw DataError("checkpoint has an unreadable RNG state");
  state_.step = ckpt.step;
  begin_epoch(static_cast<int>(ckpt.epoch));
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest '" + manifest.string() + "'");
  const auto base = manifest.parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(manifest.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.contains("hr")) throw DataError(manifest.string() + ":" + std::to_string(line_no) + ": missing 'hr'");
    if (!j.contains("obb") || !j.at("obb").is_string()) {
      throw DataError(manifest.string() + ":" + std::to_string(line_no) + ": entry has no OBB label");
    }
    auto resolve = [&](const std::string& p) {
      const std::filesystem::path path(p);
      return path.is_absolute() ? path : base / path;
    };
    entries.push_back({resolve(j.at("hr").get<std::string>()), resolve(j.at("obb").get<std::string>())});
  }
  if (entries.empty()) throw DataError("manifest '" + manifest.string() + "' lists no images");
  return entries;
}

std::filesystem::path checkpoint_path(const std::filesystem::path& out_dir, int completed_epochs) {
  std::ostringstream name;
  name << "epoch_" << std::setw(4) << std::setfill('0') << completed_epochs << ".ckpt";
  return out_dir / name.str();
}

std::filesystem::path run(const TrainConfig& cfg, const std::filesystem::path& manifest,
                          const std::filesystem::path& out_dir, const RunOptions& options) {
  cfg.validate();
  const auto entries = read_manifest(manifest);

  std::vector<ImageTensor> images;
  std::vector<ObbLabel> labels;
  for (const auto& e : entries) {
    images.push_back(load_image(e.hr));
    labels.push_back(load_obb(e.obb));
    if (images.back().height() != labels.back().height() || images.back().width() != labels.back().width()) {
      throw DataError("OBB label '" + e.obb.string() + "' is not aligned with '" + e.hr.string() + "'");
    }
  }

  const auto extractor = cfg.extractor.build();
  const std::uint32_t frozen = extractor->fingerprint();
  Trainer trainer(cfg, extractor);
  if (options.resume_from) trainer.restore(load_checkpoint(*options.resume_from));

  std::filesystem::create_directories(out_dir);
  std::ofstream log(out_dir / "train_log.jsonl", options.resume_from ? std::ios::app : std::ios::trunc);
  if (!log) throw IoError("cannot write training log in '" + out_dir.string() + "'");

  const int batch_size = cfg.schedule.batch_size;
  std::filesystem::path last = options.resume_from.value_or(std::filesystem::path{});
  for (int epoch = trainer.state().epoch; epoch < cfg.schedule.total_epochs(); ++epoch) {
    trainer.begin_epoch(epoch);
    auto& rng = trainer.state().rng;
    std::vector<int> order(images.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<PatchPair> patches;
    patches.reserve(order.size());
    for (const int id : order) {
      patches.push_back(sample_patch_pair(images[static_cast<std::size_t>(id)], labels[static_cast<std::size_t>(id)],
                                          rng, cfg.patch_size, cfg.generator.scale));
    }

    for (std::size_t start = 0; start < patches.size(); start += static_cast<std::size_t>(batch_size)) {
      const std::size_t end = std::min(patches.size(), start + static_cast<std::size_t>(batch_size));
      const Batch batch = make_batch(std::span<const PatchPair>(patches).subspan(start, end - start),
                                     std::vector<int>(order.begin() + static_cast<std::ptrdiff_t>(start),
                                                      order.begin() + static_cast<std::ptrdiff_t>(end)));
      const StepRecord rec = trainer.state().phase == Phase::kPretrain ? trainer.pretrain_step(batch)
                                                                       : trainer.adversarial_step(batch);
      log << rec.to_json().dump() << '\n';
      if (options.on_step) options.on_step(rec);
    }
    log.flush();

    if (extractor->fingerprint() != frozen) throw RuntimeFailure("feature extractor weights changed during training");

    trainer.state().epoch = epoch + 1;
    last = checkpoint_path(out_dir, epoch + 1);
    save_checkpoint(trainer.checkpoint(), last);
    if (options.stop_after_epochs && epoch + 1 >= *options.stop_after_epochs) break;
  }
  return last;
}

}  // namespace tpsr
