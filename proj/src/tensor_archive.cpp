#include "tpsr/tensor_archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "tpsr/error.hpp"

namespace tpsr {
namespace {

constexpr char kMagic[8] = {'T', 'P', 'S', 'R', 'A', 'R', 'C', 'H'};

std::string dtype_name(torch::ScalarType t) {
  switch (t) {
    case torch::kFloat32: return "float32";
    case torch::kFloat64: return "float64";
    case torch::kInt64: return "int64";
    default: throw DataError(std::string("unsupported tensor dtype ") + c10::toString(t));
  }
}

torch::ScalarType dtype_from(const std::string& name) {
  if (name == "float32") return torch::kFloat32;
  if (name == "float64") return torch::kFloat64;
  if (name == "int64") return torch::kInt64;
  throw DataError("unknown tensor dtype '" + name + "'");
}

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T get(const std::vector<std::uint8_t>& in, std::size_t& pos, const std::string& origin) {
  if (pos + sizeof(T) > in.size()) throw DataError("truncated archive '" + origin + "'");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void TensorArchive::add(const std::string& name, const torch::Tensor& tensor) {
  dtype_name(tensor.scalar_type());
  auto stored = tensor.detach().to(torch::kCPU).contiguous().clone();
  if (const auto it = index_.find(name); it != index_.end()) {
    entries_[it->second].second = std::move(stored);
    return;
  }
  index_.emplace(name, entries_.size());
  entries_.emplace_back(name, std::move(stored));
}

const torch::Tensor& TensorArchive::at(const std::string& name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) throw DataError("archive has no tensor '" + name + "'");
  return entries_[it->second].second;
}

std::vector<std::string> TensorArchive::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, t] : entries_) out.push_back(name);
  return out;
}

std::vector<std::uint8_t> TensorArchive::serialize() const {
  nlohmann::json tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : entries_) {
    const auto nbytes = static_cast<std::uint64_t>(t.numel()) * t.element_size();
    tensors.push_back({{"name", name},
                       {"dtype", dtype_name(t.scalar_type())},
                       {"shape", t.sizes().vec()},
                       {"offset", offset},
                       {"nbytes", nbytes}});
    offset += nbytes;
  }
  const nlohmann::json manifest{{"kind", kind_}, {"meta", meta_}, {"tensors", std::move(tensors)}};
  const std::string text = manifest.dump();

  std::vector<std::uint8_t> out;
  out.reserve(64 + text.size() + offset);
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, kContainerVersion);
  put<std::uint64_t>(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  put<std::uint64_t>(out, offset);
  for (const auto& [name, t] : entries_) {
    const auto* p = static_cast<const std::uint8_t*>(t.data_ptr());
    out.insert(out.end(), p, p + static_cast<std::size_t>(t.numel()) * t.element_size());
  }
  put<std::uint32_t>(out, crc_of(out.data(), out.size()));
  return out;
}

void TensorArchive::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write archive '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing archive '" + path.string() + "'");
}

TensorArchive TensorArchive::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open archive '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes, path.string());
}

TensorArchive TensorArchive::deserialize(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
  if (bytes.size() < sizeof(kMagic) + 4 + 8 + 8 + 4 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw DataError("'" + origin + "' is not a tensor archive");
  }
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, bytes.data() + bytes.size() - 4, 4);
  if (crc_of(bytes.data(), bytes.size() - 4) != stored_crc) {
    throw DataError("checksum mismatch in '" + origin + "' (corrupt file)");
  }

  std::size_t pos = sizeof(kMagic);
  const auto version = get<std::uint32_t>(bytes, pos, origin);
  if (version != kContainerVersion) {
    throw DataError("archive '" + origin + "' has container version " + std::to_string(version) + ", expected " +
                    std::to_string(kContainerVersion));
  }
  const auto manifest_len = get<std::uint64_t>(bytes, pos, origin);
  if (pos + manifest_len > bytes.size()) throw DataError("truncated archive '" + origin + "'");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                     bytes.begin() + static_cast<std::ptrdiff_t>(pos + manifest_len));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad manifest in '" + origin + "': " + e.what());
  }
  pos += manifest_len;
  const auto payload_len = get<std::uint64_t>(bytes, pos, origin);
  const std::size_t payload_start = pos;
  if (payload_start + payload_len + 4 != bytes.size()) throw DataError("payload size mismatch in '" + origin + "'");

  TensorArchive archive(manifest.value("kind", std::string{}));
  archive.meta_ = manifest.value("meta", nlohmann::json::object());
  for (const auto& entry : manifest.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const auto dtype = dtype_from(entry.at("dtype").get<std::string>());
    const auto shape = entry.at("shape").get<std::vector<std::int64_t>>();
    const auto offset = entry.at("offset").get<std::uint64_t>();
    const auto nbytes = entry.at("nbytes").get<std::uint64_t>();
    auto t = torch::empty(shape, torch::TensorOptions().dtype(dtype));
    if (static_cast<std::uint64_t>(t.numel()) * t.element_size() != nbytes || offset + nbytes > payload_len) {
      throw DataError("tensor '" + name + "' has inconsistent extent in '" + origin + "'");
    }
    std::memcpy(t.data_ptr(), bytes.data() + payload_start + offset, nbytes);
    archive.index_.emplace(name, archive.entries_.size());
    archive.entries_.emplace_back(name, std::move(t));
  }
  return archive;
}

std::uint32_t tensor_crc(const torch::Tensor& tensor) {
  const auto t = tensor.detach().to(torch::kCPU).contiguous();
  return crc_of(static_cast<const std::uint8_t*>(t.data_ptr()), static_cast<std::size_t>(t.numel()) * t.element_size());
}

}  // namespace tpsr
