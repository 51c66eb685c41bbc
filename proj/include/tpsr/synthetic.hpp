#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "tpsr/image.hpp"
#include "tpsr/obb.hpp"

namespace tpsr::synth {

// Class ids used by generated scenes.
enum ClassId : std::int32_t {
  kSky = 1,
  kGrass = 2,
  kTree = 3,
  kDirt = 4,
  kSea = 5,
  kPerson = 10,
  kCar = 11,
  kHouse = 12,
};

// Taxonomy with COCO-Stuff-style supercategories (sky, plant, ground, water)
// for the background classes.
std::shared_ptr<const ClassTaxonomy> taxonomy();

enum class Shape { kRectangle, kEllipse };
enum class ShapeFamily { kRectangles, kEllipses, kMixed };

// Analytic object region in pixel-center coordinates: pixel (x, y) is
// inside when its center (x + 0.5, y + 0.5) satisfies the shape test.
struct SceneObject {
  Shape shape = Shape::kRectangle;
  std::int32_t class_id = kPerson;
  double cx = 0.0;
  double cy = 0.0;
  double half_width = 0.0;
  double half_height = 0.0;

  bool contains(int x, int y) const;
};

struct SceneSpec {
  int size = 128;
  std::uint64_t seed = 0;
  double horizon = 0.4;  // fraction of rows covered by sky
  int object_count = 2;
  ShapeFamily shapes = ShapeFamily::kMixed;
  double min_object_fraction = 0.15;  // object extent relative to the canvas side
  double max_object_fraction = 0.4;
  // When non-empty these objects are placed instead of random ones.
  std::vector<SceneObject> objects;
};

struct Scene {
  ImageTensor image;
  SegmentationLabel segmentation;
  std::vector<SceneObject> objects;  // in painting order
};

Scene generate_scene(const SceneSpec& spec);

// Writes hr/, seg/, obb/ PNGs, classes.json and manifest.jsonl (paths
// relative to out_dir). Scene i uses seed spec.seed + i.
std::filesystem::path generate_corpus(int n, const SceneSpec& spec, const std::filesystem::path& out_dir,
                                      double disk_diameter = 2.0);

}  // namespace tpsr::synth
