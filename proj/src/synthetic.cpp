#include "tpsr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "tpsr/error.hpp"

namespace tpsr::synth {
namespace {

struct Rgb {
  float r, g, b;
};

void paint(ImageTensor& img, int y, int x, Rgb c) {
  img(y, x, 0) = std::clamp(c.r, 0.0f, 1.0f);
  img(y, x, 1) = std::clamp(c.g, 0.0f, 1.0f);
  img(y, x, 2) = std::clamp(c.b, 0.0f, 1.0f);
}

std::string scene_name(int i) {
  std::ostringstream s;
  s << "scene_" << std::setw(4) << std::setfill('0') << i << ".png";
  return s.str();
}

}  // namespace

std::shared_ptr<const ClassTaxonomy> taxonomy() {
  static const auto tax = std::make_shared<const ClassTaxonomy>(std::map<std::int32_t, ClassInfo>{
      {kSky, {"sky-other", "sky"}},
      {kGrass, {"grass", "plant"}},
      {kTree, {"tree", "plant"}},
      {kDirt, {"dirt", "ground"}},
      {kSea, {"sea", "water"}},
      {kPerson, {"person", "person"}},
      {kCar, {"car", "vehicle"}},
      {kHouse, {"house", "building"}},
  });
  return tax;
}

bool SceneObject::contains(int x, int y) const {
  const double dx = (x + 0.5 - cx) / half_width;
  const double dy = (y + 0.5 - cy) / half_height;
  if (shape == Shape::kRectangle) return std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
  return dx * dx + dy * dy <= 1.0;
}

Scene generate_scene(const SceneSpec& spec) {
  if (spec.size < 32) throw DataError("scene size must be at least 32 pixels");
  if (spec.horizon < 0.0 || spec.horizon > 1.0) throw DataError("horizon fraction must lie in [0,1]");
  const int n = spec.size;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Scene scene;
  scene.image = ImageTensor(n, n);
  scene.segmentation = SegmentationLabel{ClassIdRaster(n, n, kSky), taxonomy()};
  auto& ids = scene.segmentation.class_ids;

  // Background layout: sky above the horizon, two ground-level classes
  // split at a random column below it.
  const int horizon = static_cast<int>(std::lround(spec.horizon * n));
  const std::int32_t ground_classes[] = {kGrass, kTree, kDirt, kSea};
  const std::int32_t left_class = ground_classes[rng() % 4];
  const std::int32_t right_class = ground_classes[rng() % 4];
  const int split = static_cast<int>(n * (0.3 + 0.4 * unit(rng)));
  const double ripple_phase = 6.283185307179586 * unit(rng);

  std::normal_distribution<float> noise(0.0f, 1.0f);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const float hf = noise(rng);  // drawn for every pixel to keep the stream layout fixed
      if (y < horizon) {
        ids(y, x) = kSky;
        const float t = static_cast<float>(y) / static_cast<float>(std::max(horizon, 1));
        paint(scene.image, y, x, {0.45f + 0.3f * t, 0.62f + 0.22f * t, 0.95f + 0.04f * t});
        continue;
      }
      const std::int32_t cls = x < split ? left_class : right_class;
      ids(y, x) = cls;
      switch (cls) {
        case kGrass: paint(scene.image, y, x, {0.25f + 0.08f * hf, 0.55f + 0.12f * hf, 0.2f + 0.06f * hf}); break;
        case kTree: paint(scene.image, y, x, {0.12f + 0.06f * hf, 0.38f + 0.15f * hf, 0.14f + 0.05f * hf}); break;
        case kDirt: paint(scene.image, y, x, {0.5f + 0.1f * hf, 0.36f + 0.08f * hf, 0.22f + 0.06f * hf}); break;
        default: {
          const float ripple = static_cast<float>(std::sin(0.9 * y + 0.25 * x + ripple_phase));
          paint(scene.image, y, x, {0.1f + 0.05f * ripple, 0.35f + 0.08f * ripple + 0.03f * hf, 0.65f + 0.1f * ripple});
        }
      }
    }
  }

  std::vector<SceneObject> objects = spec.objects;
  if (objects.empty() && spec.object_count > 0) {
    if (spec.min_object_fraction <= 0.0 || spec.max_object_fraction < spec.min_object_fraction ||
        spec.max_object_fraction > 1.0) {
      throw DataError("object size fractions must satisfy 0 < min <= max <= 1");
    }
    const std::int32_t object_classes[] = {kPerson, kCar, kHouse};
    for (int i = 0; i < spec.object_count; ++i) {
      SceneObject o;
      o.shape = spec.shapes == ShapeFamily::kRectangles ? Shape::kRectangle
                : spec.shapes == ShapeFamily::kEllipses ? Shape::kEllipse
                : (rng() % 2 == 0 ? Shape::kRectangle : Shape::kEllipse);
      o.class_id = object_classes[rng() % 3];
      const double span = spec.max_object_fraction - spec.min_object_fraction;
      o.half_width = 0.5 * n * (spec.min_object_fraction + span * unit(rng));
      o.half_height = 0.5 * n * (spec.min_object_fraction + span * unit(rng));
      o.cx = o.half_width + (n - 2.0 * o.half_width) * unit(rng);
      o.cy = o.half_height + (n - 2.0 * o.half_height) * unit(rng);
      objects.push_back(o);
    }
  }

  for (const auto& o : objects) {
    if (!(o.half_width > 0.0) || !(o.half_height > 0.0) || o.cx - o.half_width < 0.0 || o.cy - o.half_height < 0.0 ||
        o.cx + o.half_width > n || o.cy + o.half_height > n) {
      throw DataError("object does not fit the " + std::to_string(n) + "px canvas");
    }
    const Rgb base{static_cast<float>(0.2 + 0.7 * unit(rng)), static_cast<float>(0.2 + 0.7 * unit(rng)),
                   static_cast<float>(0.2 + 0.7 * unit(rng))};
    const int y0 = std::max(0, static_cast<int>(std::floor(o.cy - o.half_height)));
    const int y1 = std::min(n - 1, static_cast<int>(std::ceil(o.cy + o.half_height)));
    const int x0 = std::max(0, static_cast<int>(std::floor(o.cx - o.half_width)));
    const int x1 = std::min(n - 1, static_cast<int>(std::ceil(o.cx + o.half_width)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (!o.contains(x, y)) continue;
        ids(y, x) = o.class_id;
        const float shade = static_cast<float>(0.85 + 0.3 * (y - o.cy + o.half_height) / (2.0 * o.half_height));
        paint(scene.image, y, x, {base.r * shade, base.g * shade, base.b * shade});
      }
    }
  }
  scene.objects = std::move(objects);
  return scene;
}

std::filesystem::path generate_corpus(int n, const SceneSpec& spec, const std::filesystem::path& out_dir,
                                      double disk_diameter) {
  if (n < 0) throw DataError("corpus size must be >= 0");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  const auto manifest = out_dir / "manifest.jsonl";
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + manifest.string() + "'");
  if (n == 0) return manifest;

  for (const char* sub : {"hr", "seg", "obb"}) fs::create_directories(out_dir / sub);
  {
    std::ofstream classes(out_dir / "classes.json", std::ios::trunc);
    if (!classes) throw IoError("cannot write class map in '" + out_dir.string() + "'");
    classes << taxonomy()->to_json().dump(2) << '\n';
  }

  const BackgroundClassSet background;
  for (int i = 0; i < n; ++i) {
    SceneSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(i);
    const Scene scene = generate_scene(s);
    const std::string name = scene_name(i);
    save_image(scene.image, out_dir / "hr" / name);
    save_class_ids(scene.segmentation.class_ids, out_dir / "seg" / name);
    save_obb(build_obb_label(scene.segmentation, background, {disk_diameter, EdgeSides::kBoth}),
             out_dir / "obb" / name);
    out << nlohmann::json{{"hr", "hr/" + name}, {"obb", "obb/" + name}}.dump() << '\n';
  }
  if (!out.flush()) throw IoError("cannot write '" + manifest.string() + "'");
  return manifest;
}

}  // namespace tpsr::synth
