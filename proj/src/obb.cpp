#include "tpsr/obb.hpp"

#include <cmath>
#include <fstream>
#include <utility>

#include "tpsr/png_io.hpp"

namespace tpsr {

ClassTaxonomy ClassTaxonomy::from_json(const nlohmann::json& j) {
  const nlohmann::json* list = nullptr;
  if (j.contains("classes")) {
    list = &j.at("classes");
  } else if (j.contains("categories")) {
    list = &j.at("categories");
  }
  if (list == nullptr || !list->is_array()) {
    throw DataError("class map must contain a 'classes' or 'categories' array");
  }
  std::map<std::int32_t, ClassInfo> classes;
  for (const auto& entry : *list) {
    if (!entry.contains("id") || !entry.contains("name")) throw DataError("class map entry needs 'id' and 'name'");
    ClassInfo info{entry.at("name").get<std::string>(), entry.value("supercategory", std::string{})};
    const auto id = entry.at("id").get<std::int32_t>();
    if (!classes.emplace(id, std::move(info)).second) {
      throw DataError("duplicate class id " + std::to_string(id) + " in class map");
    }
  }
  return ClassTaxonomy(std::move(classes));
}

ClassTaxonomy ClassTaxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open class map '" + path.string() + "'");
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid class map '" + path.string() + "': " + e.what());
  }
}

nlohmann::json ClassTaxonomy::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [id, info] : classes_) {
    nlohmann::json entry{{"id", id}, {"name", info.name}};
    if (!info.supercategory.empty()) entry["supercategory"] = info.supercategory;
    list.push_back(std::move(entry));
  }
  return nlohmann::json{{"classes", std::move(list)}};
}

std::string ClassTaxonomy::name_of(std::int32_t id) const {
  const auto it = classes_.find(id);
  return it == classes_.end() ? std::string("unlabeled") : it->second.name;
}

std::set<std::int32_t> ClassTaxonomy::ids_matching(const std::string& name) const {
  std::set<std::int32_t> ids;
  for (const auto& [id, info] : classes_) {
    if (info.name == name || info.supercategory == name) ids.insert(id);
  }
  return ids;
}

BackgroundClassSet::BackgroundClassSet() : names_{"sky", "plant", "ground", "water"} {}

BackgroundClassSet::BackgroundClassSet(std::set<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw DataError("background class set must not be empty");
}

std::set<std::int32_t> BackgroundClassSet::resolve(const ClassTaxonomy& taxonomy) const {
  std::set<std::int32_t> ids;
  for (const auto& name : names_) {
    const auto matched = taxonomy.ids_matching(name);
    if (matched.empty()) throw DataError("background class '" + name + "' matches no class in the class map");
    ids.insert(matched.begin(), matched.end());
  }
  return ids;
}

BinaryRaster detect_class_edges(const ClassIdRaster& ids, EdgeSides sides) {
  const int h = ids.height();
  const int w = ids.width();
  BinaryRaster edges(h, w, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w && ids(y, x) != ids(y, x + 1)) {
        edges(y, x) = 1;
        if (sides == EdgeSides::kBoth) edges(y, x + 1) = 1;
      }
      if (y + 1 < h && ids(y, x) != ids(y + 1, x)) {
        edges(y, x) = 1;
        if (sides == EdgeSides::kBoth) edges(y + 1, x) = 1;
      }
    }
  }
  return edges;
}

BinaryRaster dilate_disk(const BinaryRaster& mask, double diameter) {
  if (!(diameter >= 0.0) || !std::isfinite(diameter)) throw DataError("disk diameter must be a finite value >= 0");
  const double radius = diameter / 2.0;
  const double r2 = radius * radius + 1e-9;
  const int reach = static_cast<int>(std::floor(radius + 1e-9));

  std::vector<std::pair<int, int>> offsets;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      if (static_cast<double>(dy * dy + dx * dx) <= r2) offsets.emplace_back(dy, dx);
    }
  }

  const int h = mask.height();
  const int w = mask.width();
  BinaryRaster out(h, w, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask(y, x) == 0) continue;
      for (const auto& [dy, dx] : offsets) {
        const int yy = y + dy;
        const int xx = x + dx;
        if (yy >= 0 && yy < h && xx >= 0 && xx < w) out(yy, xx) = 1;
      }
    }
  }
  return out;
}

ObbLabel build_obb_label(const SegmentationLabel& seg, const BackgroundClassSet& bg, const ObbOptions& options) {
  if (!seg.taxonomy) throw DataError("segmentation label has no class map");
  const std::set<std::int32_t> bg_ids = bg.resolve(*seg.taxonomy);
  const BinaryRaster boundary =
      dilate_disk(detect_class_edges(seg.class_ids, options.edge_sides), options.disk_diameter);

  const int h = seg.class_ids.height();
  const int w = seg.class_ids.width();
  ObbLabel out(h, w, Region::kObject);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (boundary(y, x) != 0) {
        out(y, x) = Region::kBoundary;
      } else if (bg_ids.contains(seg.class_ids(y, x))) {
        out(y, x) = Region::kBackground;
      }
    }
  }
  return out;
}

MaskSet masks_from_obb(const ObbLabel& obb, double disk_diameter) {
  MaskSet masks{BinaryRaster(obb.height(), obb.width(), 0), BinaryRaster(obb.height(), obb.width(), 0),
                BinaryRaster(obb.height(), obb.width(), 0), disk_diameter};
  for (int y = 0; y < obb.height(); ++y) {
    for (int x = 0; x < obb.width(); ++x) {
      switch (obb(y, x)) {
        case Region::kObject: masks.object(y, x) = 1; break;
        case Region::kBackground: masks.background(y, x) = 1; break;
        case Region::kBoundary: masks.boundary(y, x) = 1; break;
      }
    }
  }
  return masks;
}

void save_obb(const ObbLabel& obb, const std::filesystem::path& path) {
  std::vector<std::uint8_t> samples(obb.size());
  const auto values = obb.values();
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = static_cast<std::uint8_t>(values[i]);
  png::write_u8(path, obb.width(), obb.height(), 1, samples);
}

ObbLabel load_obb(const std::filesystem::path& path) {
  const png::Decoded decoded = png::read(path);
  if (decoded.channels != 1 || decoded.bit_depth != 8) {
    throw DataError("OBB label '" + path.string() + "' must be a single-channel 8-bit PNG");
  }
  ObbLabel obb(decoded.height, decoded.width);
  auto values = obb.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto v = decoded.samples[i];
    if (v > 2) {
      throw DataError("OBB label '" + path.string() + "' contains invalid value " + std::to_string(v) +
                      " (expected 0, 1 or 2)");
    }
    values[i] = static_cast<Region>(v);
  }
  return obb;
}

SegmentationLabel load_segmentation(const std::filesystem::path& path,
                                    std::shared_ptr<const ClassTaxonomy> taxonomy) {
  const png::Decoded decoded = png::read(path);
  if (decoded.channels != 1) {
    throw DataError("segmentation label '" + path.string() + "' must be a single-channel class-id PNG");
  }
  SegmentationLabel seg{ClassIdRaster(decoded.height, decoded.width), std::move(taxonomy)};
  auto values = seg.class_ids.values();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = decoded.samples[i];
  return seg;
}

void save_class_ids(const ClassIdRaster& ids, const std::filesystem::path& path) {
  std::vector<std::uint8_t> samples(ids.size());
  const auto values = ids.values();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (values[i] < 0 || values[i] > 255) throw DataError("class id out of 8-bit range for '" + path.string() + "'");
    samples[i] = static_cast<std::uint8_t>(values[i]);
  }
  png::write_u8(path, ids.width(), ids.height(), 1, samples);
}

}  // namespace tpsr
