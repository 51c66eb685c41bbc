#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

namespace tpsr {

// Named-tensor container on disk:
//
//   "TPSRARCH"            8-byte magic
//   u32 container version
//   u64 manifest length, manifest JSON (UTF-8)
//   u64 payload length,  raw little-endian tensor bytes
//   u32 CRC-32 of every preceding byte
//
// The manifest holds {"kind", "meta", "tensors": [{name, dtype, shape,
// offset, nbytes}]}; offsets are relative to the payload start.
class TensorArchive {
 public:
  static constexpr std::uint32_t kContainerVersion = 1;

  TensorArchive() = default;
  explicit TensorArchive(std::string kind) : kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }
  nlohmann::json& meta() { return meta_; }
  const nlohmann::json& meta() const { return meta_; }

  // Stores a contiguous CPU copy. Supported dtypes: float32, float64, int64.
  void add(const std::string& name, const torch::Tensor& tensor);
  bool contains(const std::string& name) const { return index_.contains(name); }
  // Throws DataError naming the tensor when absent.
  const torch::Tensor& at(const std::string& name) const;
  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }

  void save(const std::filesystem::path& path) const;
  std::vector<std::uint8_t> serialize() const;
  static TensorArchive load(const std::filesystem::path& path);
  static TensorArchive deserialize(const std::vector<std::uint8_t>& bytes, const std::string& origin);

 private:
  std::string kind_;
  nlohmann::json meta_ = nlohmann::json::object();
  std::vector<std::pair<std::string, torch::Tensor>> entries_;
  std::map<std::string, std::size_t> index_;
};

// CRC-32 fingerprint of a tensor's bytes (contiguous CPU copy).
std::uint32_t tensor_crc(const torch::Tensor& tensor);

}  // namespace tpsr
