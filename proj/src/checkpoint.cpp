#include "tpsr/checkpoint.hpp"

#include "tpsr/error.hpp"

namespace tpsr {
namespace {

void copy_checked(const TensorArchive& archive, const std::string& key, torch::Tensor& target) {
  if (!archive.contains(key)) throw DataError("checkpoint is missing tensor '" + key + "'");
  const auto& src = archive.at(key);
  if (src.sizes() != target.sizes()) {
    throw DataError("tensor '" + key + "' has shape " + c10::str(src.sizes()) + " in checkpoint but the model expects " +
                    c10::str(target.sizes()));
  }
  torch::NoGradGuard no_grad;
  target.copy_(src);
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  TensorArchive archive = ckpt.tensors;
  archive.meta() = {{"checkpoint_version", ckpt.format_version},
                    {"config", ckpt.config},
                    {"epoch", ckpt.epoch},
                    {"step", ckpt.step},
                    {"rng_state", ckpt.rng_state}};
  archive.save(path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  TensorArchive archive = TensorArchive::load(path);
  if (archive.kind() != "checkpoint") throw DataError("'" + path.string() + "' is not a checkpoint");
  const auto& meta = archive.meta();
  const int version = meta.value("checkpoint_version", -1);
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint '" + path.string() + "' has format version " + std::to_string(version) +
                    ", expected " + std::to_string(kCheckpointVersion));
  }
  Checkpoint ckpt;
  ckpt.format_version = version;
  ckpt.config = meta.value("config", nlohmann::json::object());
  ckpt.epoch = meta.value("epoch", std::int64_t{0});
  ckpt.step = meta.value("step", std::int64_t{0});
  ckpt.rng_state = meta.value("rng_state", std::string{});
  archive.meta() = nlohmann::json::object();
  ckpt.tensors = std::move(archive);
  return ckpt;
}

void store_module(TensorArchive& archive, const std::string& prefix, const torch::nn::Module& module) {
  for (const auto& p : module.named_parameters()) archive.add(prefix + "/" + p.key(), p.value());
  for (const auto& b : module.named_buffers()) archive.add(prefix + "/" + b.key(), b.value());
}

void restore_module(const TensorArchive& archive, const std::string& prefix, torch::nn::Module& module) {
  for (auto& p : module.named_parameters()) copy_checked(archive, prefix + "/" + p.key(), p.value());
  for (auto& b : module.named_buffers()) copy_checked(archive, prefix + "/" + b.key(), b.value());
}

void store_adam(TensorArchive& archive, const std::string& prefix, torch::optim::Adam& optimizer,
                const torch::nn::Module& owner) {
  auto& state = optimizer.state();
  for (const auto& p : owner.named_parameters()) {
    const auto it = state.find(p.value().unsafeGetTensorImpl());
    if (it == state.end()) continue;
    const auto& s = static_cast<const torch::optim::AdamParamState&>(*it->second);
    const std::string base = prefix + "/" + p.key();
    archive.add(base + ".exp_avg", s.exp_avg());
    archive.add(base + ".exp_avg_sq", s.exp_avg_sq());
    archive.add(base + ".step", torch::tensor(s.step(), torch::kInt64));
  }
}

void restore_adam(const TensorArchive& archive, const std::string& prefix, torch::optim::Adam& optimizer,
                  const torch::nn::Module& owner) {
  auto& state = optimizer.state();
  state.clear();
  for (const auto& p : owner.named_parameters()) {
    const std::string base = prefix + "/" + p.key();
    if (!archive.contains(base + ".step")) continue;
    auto s = std::make_unique<torch::optim::AdamParamState>();
    auto exp_avg = torch::zeros_like(p.value());
    auto exp_avg_sq = torch::zeros_like(p.value());
    copy_checked(archive, base + ".exp_avg", exp_avg);
    copy_checked(archive, base + ".exp_avg_sq", exp_avg_sq);
    s->exp_avg(exp_avg);
    s->exp_avg_sq(exp_avg_sq);
    s->step(archive.at(base + ".step").item<std::int64_t>());
    state[p.value().unsafeGetTensorImpl()] = std::move(s);
  }
}

}  // namespace tpsr
