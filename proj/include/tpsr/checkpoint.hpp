#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>
#include <torch/torch.h>

#include "tpsr/tensor_archive.hpp"

namespace tpsr {

inline constexpr int kCheckpointVersion = 1;

// Model, optimizer and loop state persisted between epochs. Tensors live in
// `tensors` under the prefixes "generator/", "discriminator/", "adam_g/" and
// "adam_d/".
struct Checkpoint {
  int format_version = kCheckpointVersion;
  nlohmann::json config = nlohmann::json::object();  // snapshot of the run configuration
  std::int64_t epoch = 0;  // completed epochs
  std::int64_t step = 0;   // completed optimizer iterations
  std::string rng_state;
  TensorArchive tensors{"checkpoint"};
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Parameters and buffers under "<prefix>/<name>".
void store_module(TensorArchive& archive, const std::string& prefix, const torch::nn::Module& module);
// Throws DataError naming the first missing or mis-shaped tensor.
void restore_module(const TensorArchive& archive, const std::string& prefix, torch::nn::Module& module);

// Adam moments and step counts keyed by the owning module's parameter names.
void store_adam(TensorArchive& archive, const std::string& prefix, torch::optim::Adam& optimizer,
                const torch::nn::Module& owner);
void restore_adam(const TensorArchive& archive, const std::string& prefix, torch::optim::Adam& optimizer,
                  const torch::nn::Module& owner);

}  // namespace tpsr
