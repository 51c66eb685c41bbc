#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "tpsr/checkpoint.hpp"
#include "tpsr/features.hpp"
#include "tpsr/losses.hpp"
#include "tpsr/networks.hpp"
#include "tpsr/patch.hpp"

namespace tpsr {

struct TrainSchedule {
  int pretrain_epochs = 25;
  int main_epochs = 55;
  double lr0 = 1e-3;
  double decay_factor = 0.1;
  int decay_every = 20;  // epochs, counted over the combined run
  int batch_size = 16;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  int total_epochs() const { return pretrain_epochs + main_epochs; }
  void validate() const;
  nlohmann::json to_json() const;
  static TrainSchedule from_json(const nlohmann::json& j);
};

// lr0 · decay_factor^⌊epoch / decay_every⌋
double lr_at(const TrainSchedule& schedule, int epoch);

enum class Phase { kPretrain, kAdversarial };
const char* phase_name(Phase phase);
Phase phase_at(const TrainSchedule& schedule, int epoch);

struct ExtractorSpec {
  ExtractorMode mode = ExtractorMode::kSurrogate;
  std::string weights_path;  // pretrained mode
  std::uint64_t seed = 0;    // surrogate mode

  std::shared_ptr<const FeatureExtractor> build() const;
  nlohmann::json to_json() const;
  static ExtractorSpec from_json(const nlohmann::json& j);
};

struct TrainConfig {
  TrainSchedule schedule;
  LossWeights weights;
  GeneratorConfig generator;
  DiscriminatorConfig discriminator;
  ExtractorSpec extractor;
  int patch_size = kHrPatchSize;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct Batch {
  torch::Tensor lr;  // [N,3,h,w]
  torch::Tensor hr;  // [N,3,4h,4w]
  MaskTensors masks;
  std::vector<int> ids;  // dataset indices, for diagnostics
};

Batch make_batch(std::span<const PatchPair> patches, std::vector<int> ids = {});

struct StepRecord {
  std::int64_t step = 0;
  int epoch = 0;
  Phase phase = Phase::kPretrain;
  double lr = 0.0;
  LossReport report;
  double adv_d = 0.0;
  bool discriminator_updated = false;
  double d_real = 0.0;  // mean discriminator output on HR
  double d_fake = 0.0;  // mean discriminator output on SR

  nlohmann::json to_json() const;
};

struct TrainState {
  int epoch = 0;          // current (or next) epoch index
  std::int64_t step = 0;  // completed iterations
  double lr = 0.0;
  Phase phase = Phase::kPretrain;
  double running_total = 0.0;  // sums over the current epoch
  std::int64_t running_count = 0;
  std::mt19937_64 rng;
};

// Owns the generator, discriminator and both Adam optimizers.
class Trainer {
 public:
  Trainer(TrainConfig cfg, std::shared_ptr<const FeatureExtractor> extractor);

  // Sets lr and phase for `epoch` and resets the running aggregates.
  void begin_epoch(int epoch);

  // One generator Adam step on pixel MSE. Discriminator untouched.
  StepRecord pretrain_step(const Batch& batch);
  // One discriminator step on adversarial_d, then one generator step on the
  // full objective. `identity_probe` substitutes SR with HR (while keeping
  // the generator in the graph) for diagnostics.
  StepRecord adversarial_step(const Batch& batch, bool identity_probe = false);

  Checkpoint checkpoint() const;
  // Throws DataError if the checkpoint was produced under another config.
  void restore(const Checkpoint& ckpt);

  const TrainConfig& config() const { return cfg_; }
  TrainState& state() { return state_; }
  const TrainState& state() const { return state_; }
  Generator& generator() { return generator_; }
  Discriminator& discriminator() { return discriminator_; }
  const FeatureExtractor& extractor() const { return *extractor_; }

 private:
  void set_lr(double lr);
  void check_batch(const Batch& batch) const;
  [[noreturn]] void fail_non_finite(const char* what, const Batch& batch) const;

  TrainConfig cfg_;
  std::shared_ptr<const FeatureExtractor> extractor_;
  Generator generator_;
  Discriminator discriminator_;
  std::unique_ptr<torch::optim::Adam> opt_g_;
  std::unique_ptr<torch::optim::Adam> opt_d_;
  TrainState state_;
};

struct ManifestEntry {
  std::filesystem::path hr;
  std::filesystem::path obb;
};

// JSON lines `{"hr": path, "obb": path}`; relative paths resolve against the
// manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);

struct RunOptions {
  std::optional<std::filesystem::path> resume_from;
  std::optional<int> stop_after_epochs;  // stop once this many epochs are complete
  std::function<void(const StepRecord&)> on_step;
};

std::filesystem::path checkpoint_path(const std::filesystem::path& out_dir, int completed_epochs);

// Pretrain then adversarial phases over the manifest; one random patch per
// image per epoch. Writes `train_log.jsonl` and `epoch_####.ckpt` into
// `out_dir` and returns the last checkpoint path.
std::filesystem::path run(const TrainConfig& cfg, const std::filesystem::path& manifest,
                          const std::filesystem::path& out_dir, const RunOptions& options = {});

}  // namespace tpsr
