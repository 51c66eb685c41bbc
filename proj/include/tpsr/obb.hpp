#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tpsr/raster.hpp"

namespace tpsr {

// Per-pixel OBB region. The numeric values are the on-disk encoding.
enum class Region : std::uint8_t { kObject = 0, kBackground = 1, kBoundary = 2 };

using ObbLabel = Raster<Region>;
using ClassIdRaster = Raster<std::int32_t>;

struct ClassInfo {
  std::string name;
  std::string supercategory;
};

// Dataset class id ↔ name map. Ids absent from the map are "unlabeled".
class ClassTaxonomy {
 public:
  ClassTaxonomy() = default;
  explicit ClassTaxonomy(std::map<std::int32_t, ClassInfo> classes) : classes_(std::move(classes)) {}

  // Accepts {"classes": [...]} or COCO-style {"categories": [...]} where
  // each entry carries "id", "name" and optionally "supercategory".
  static ClassTaxonomy from_json(const nlohmann::json& j);
  static ClassTaxonomy load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  std::string name_of(std::int32_t id) const;
  // Ids whose name or supercategory equals `name`.
  std::set<std::int32_t> ids_matching(const std::string& name) const;
  const std::map<std::int32_t, ClassInfo>& classes() const { return classes_; }

 private:
  std::map<std::int32_t, ClassInfo> classes_;
};

struct SegmentationLabel {
  ClassIdRaster class_ids;
  std::shared_ptr<const ClassTaxonomy> taxonomy;
};

// Class names grouped into the "background" region.
class BackgroundClassSet {
 public:
  BackgroundClassSet();  // {sky, plant, ground, water}
  explicit BackgroundClassSet(std::set<std::string> names);

  const std::set<std::string>& names() const { return names_; }
  // Throws DataError if some name matches no class id.
  std::set<std::int32_t> resolve(const ClassTaxonomy& taxonomy) const;

 private:
  std::set<std::string> names_;
};

enum class EdgeSides {
  kBoth,     // both pixels of a differing 4-neighbor pair
  kForward,  // only the pixel whose right/lower neighbor differs
};

struct ObbOptions {
  double disk_diameter = 2.0;
  EdgeSides edge_sides = EdgeSides::kBoth;
};

struct MaskSet {
  BinaryRaster object;
  BinaryRaster background;
  BinaryRaster boundary;
  double disk_diameter = 2.0;
};

BinaryRaster detect_class_edges(const ClassIdRaster& class_ids, EdgeSides sides = EdgeSides::kBoth);

// Pixel set to 1 iff an input 1-pixel lies within Euclidean distance
// diameter/2.
BinaryRaster dilate_disk(const BinaryRaster& mask, double diameter);

ObbLabel build_obb_label(const SegmentationLabel& seg, const BackgroundClassSet& bg,
                         const ObbOptions& options = {});

MaskSet masks_from_obb(const ObbLabel& obb, double disk_diameter = 2.0);

void save_obb(const ObbLabel& obb, const std::filesystem::path& path);
ObbLabel load_obb(const std::filesystem::path& path);

// Single-channel 8/16-bit class-id PNG.
SegmentationLabel load_segmentation(const std::filesystem::path& path,
                                    std::shared_ptr<const ClassTaxonomy> taxonomy);
void save_class_ids(const ClassIdRaster& ids, const std::filesystem::path& path);

}  // namespace tpsr
