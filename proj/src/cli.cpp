#include "tpsr/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <torch/torch.h>

#include "tpsr/checkpoint.hpp"
#include "tpsr/error.hpp"
#include "tpsr/log.hpp"
#include "tpsr/metrics.hpp"
#include "tpsr/obb.hpp"
#include "tpsr/resize.hpp"
#include "tpsr/synthetic.hpp"
#include "tpsr/tensor_convert.hpp"
#include "tpsr/trainer.hpp"

namespace tpsr::cli {
namespace {

namespace fs = std::filesystem;

// JSON config files: top-level keys are global options, nested objects
// named after a subcommand hold that subcommand's options.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return collect(app, default_also).dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("invalid JSON config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

  static nlohmann::json collect(const CLI::App* app, bool default_also) {
    nlohmann::json j = nlohmann::json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& results = opt->results();
        j[name] = results.size() == 1 ? nlohmann::json(results.front()) : nlohmann::json(results);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      if (sub->parsed()) j[sub->get_name()] = collect(sub, default_also);
    }
    return j;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const nlohmann::json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        flatten(value, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string log_level = "info";
};

struct MakeObbOptions {
  std::string seg_dir, classes, out_dir;
  std::string bg_classes = "sky,plant,ground,water";
  double d1 = 2.0;
  std::string edge_sides = "both";
};

struct GenSynthOptions {
  std::string out_dir;
  int count = 16;
  int size = 128;
  int objects = 2;
  double horizon = 0.4;
  double d1 = 2.0;
};

struct TrainOptions {
  std::string manifest, out_dir, vgg_weights, resume;
  TrainConfig cfg;
  std::string skip = "add";
};

struct SrOptions {
  std::string checkpoint, out_dir;
  std::vector<std::string> inputs;
};

struct EvalOptions {
  std::string sr_dir, hr_dir, obb_dir;
  std::string out = "-";
  std::string color = "rgb";
  int shave = 4;
};

struct BenchOptions {
  std::string checkpoint;
  std::string out = "-";
  int width = 256;
  int height = 192;
  int repeats = 10;
  int warmup = kBenchmarkWarmup;
};

std::vector<fs::path> png_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::set<std::string> split_names(const std::string& csv) {
  std::set<std::string> names;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) names.insert(item.substr(b, e - b + 1));
  }
  return names;
}

Generator generator_from_checkpoint(const fs::path& path) {
  const Checkpoint ckpt = load_checkpoint(path);
  const auto cfg = GeneratorConfig::from_json(ckpt.config.value("generator", nlohmann::json::object()));
  Generator gen(cfg);
  restore_module(ckpt.tensors, "generator", *gen);
  gen->eval();
  return gen;
}

std::ostream& open_output(const std::string& target, std::ofstream& file, std::ostream& out) {
  if (target == "-") return out;
  file.open(target, std::ios::trunc);
  if (!file) throw IoError("cannot write '" + target + "'");
  return file;
}

void run_make_obb(const MakeObbOptions& o) {
  const auto taxonomy = std::make_shared<const ClassTaxonomy>(ClassTaxonomy::load(o.classes));
  const BackgroundClassSet bg(split_names(o.bg_classes));
  ObbOptions options;
  options.disk_diameter = o.d1;
  if (o.edge_sides == "both") {
    options.edge_sides = EdgeSides::kBoth;
  } else if (o.edge_sides == "forward") {
    options.edge_sides = EdgeSides::kForward;
  } else {
    throw DataError("--edge-sides must be 'both' or 'forward'");
  }
  fs::create_directories(o.out_dir);
  int count = 0;
  for (const auto& file : png_files(o.seg_dir)) {
    const auto seg = load_segmentation(file, taxonomy);
    save_obb(build_obb_label(seg, bg, options), fs::path(o.out_dir) / file.filename());
    ++count;
  }
  log::info("wrote " + std::to_string(count) + " OBB labels to " + o.out_dir);
}

void run_gen_synth(const GenSynthOptions& o, const GlobalOptions& g) {
  synth::SceneSpec spec;
  spec.size = o.size;
  spec.seed = g.seed;
  spec.horizon = o.horizon;
  spec.object_count = o.objects;
  const auto manifest = synth::generate_corpus(o.count, spec, o.out_dir, o.d1);
  if (o.count > 0) {
    const fs::path lr_dir = fs::path(o.out_dir) / "lr";
    fs::create_directories(lr_dir);
    for (const auto& file : png_files(fs::path(o.out_dir) / "hr")) {
      save_image(bicubic_degrade(load_image(file), kScaleFactor), lr_dir / file.filename());
    }
  }
  log::info("wrote " + std::to_string(o.count) + " scenes, manifest " + manifest.string());
}

void run_train(TrainOptions o, const GlobalOptions& g) {
  o.cfg.schedule.seed = g.seed;
  if (!o.vgg_weights.empty()) {
    o.cfg.extractor.mode = ExtractorMode::kPretrained;
    o.cfg.extractor.weights_path = o.vgg_weights;
  } else {
    log::warn("no --vgg-weights given; using the seeded surrogate feature extractor");
  }
  o.cfg.generator.skip = o.skip == "concat" ? SkipMode::kConcat : SkipMode::kAdd;
  if (o.skip != "add" && o.skip != "concat") throw DataError("--skip must be 'add' or 'concat'");
  o.cfg.discriminator.input_size = o.cfg.patch_size;

  RunOptions run_options;
  if (!o.resume.empty()) run_options.resume_from = o.resume;
  run_options.on_step = [](const StepRecord& rec) { log::debug(rec.to_json().dump()); };
  const auto last = run(o.cfg, o.manifest, o.out_dir, run_options);
  log::info("training finished; last checkpoint " + last.string());
}

void run_sr(const SrOptions& o) {
  torch::NoGradGuard no_grad;
  Generator gen = generator_from_checkpoint(o.checkpoint);
  fs::create_directories(o.out_dir);
  for (const auto& input : o.inputs) {
    const ImageTensor lr = load_image(input);
    const ImageTensor sr = from_tensor(gen->forward(to_tensor(lr)));
    const fs::path target = fs::path(o.out_dir) / (fs::path(input).stem().string() + ".png");
    save_image(sr, target);
    log::info(input + " -> " + target.string() + " (" + std::to_string(sr.width()) + "x" + std::to_string(sr.height()) + ")");
  }
}

std::string format_metric(std::optional<double> v, int precision) {
  if (!v) return "";
  if (std::isinf(*v)) return "inf";
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << *v;
  return s.str();
}

void run_eval(const EvalOptions& o, std::ostream& out) {
  MetricConvention conv;
  conv.color = color_mode_from(o.color);
  conv.border_shave = o.shave;
  std::ofstream file;
  std::ostream& csv = open_output(o.out, file, out);
  csv << "image,psnr,ssim,psnr_object,psnr_background,psnr_boundary\n";
  for (const auto& hr_path : png_files(o.hr_dir)) {
    const fs::path sr_path = fs::path(o.sr_dir) / hr_path.filename();
    if (!fs::exists(sr_path)) throw IoError("no SR image for '" + hr_path.filename().string() + "' in " + o.sr_dir);
    const ImageTensor hr = load_image(hr_path);
    const ImageTensor sr = load_image(sr_path);
    const double p = psnr(sr, hr, conv);
    const double s = ssim(sr, hr, conv);
    RegionScores regions;
    if (!o.obb_dir.empty()) {
      regions = region_scores(sr, hr, masks_from_obb(load_obb(fs::path(o.obb_dir) / hr_path.filename())), conv);
    }
    csv << hr_path.filename().string() << ',' << format_metric(p, 4) << ',' << format_metric(s, 6) << ','
        << format_metric(regions.object, 4) << ',' << format_metric(regions.background, 4) << ','
        << format_metric(regions.boundary, 4) << '\n';
  }
  csv.flush();
}

void run_bench(const BenchOptions& o, std::ostream& out) {
  Generator gen = generator_from_checkpoint(o.checkpoint);
  const auto report = benchmark_throughput(gen, o.width, o.height, o.repeats, o.warmup);
  std::ofstream file;
  std::ostream& sink = open_output(o.out, file, out);
  sink << report.to_json().dump() << '\n';
  std::ostringstream msg;
  msg << std::fixed << std::setprecision(3) << "median " << report.fps_median << " fps at " << o.width << 'x'
      << o.height << " input (" << o.width * 4 << 'x' << o.height * 4
      << " output); reference figure 31.2 fps on a GTX 1080 Ti";
  log::info(msg.str());
}

}  // namespace

std::vector<std::string> subcommands() { return {"make-obb", "gen-synth", "train", "sr", "eval", "bench"}; }

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Targeted perceptual loss super-resolution toolkit", "tpsr"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags take precedence")->envname("TPSR_CONFIG");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Maximum number of compute threads")->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  MakeObbOptions make_obb;
  auto* cmd_obb = app.add_subcommand("make-obb", "Convert class-id segmentation PNGs into OBB label PNGs");
  cmd_obb->add_option("--seg-dir", make_obb.seg_dir, "Directory of class-id PNGs")->required();
  cmd_obb->add_option("--classes", make_obb.classes, "JSON class-name/id map")->required();
  cmd_obb->add_option("--out-dir", make_obb.out_dir, "Output directory for OBB PNGs")->required();
  cmd_obb->add_option("--bg-classes", make_obb.bg_classes, "Comma-separated background class names");
  cmd_obb->add_option("--d1", make_obb.d1, "Boundary dilation disk diameter in pixels")
      ->check(CLI::NonNegativeNumber);
  cmd_obb->add_option("--edge-sides", make_obb.edge_sides, "Mark 'both' pixels of a class change or 'forward' only")
      ->check(CLI::IsMember({"both", "forward"}));

  GenSynthOptions gen_synth;
  auto* cmd_synth = app.add_subcommand("gen-synth", "Generate a synthetic corpus with exact segmentation");
  cmd_synth->add_option("--out-dir", gen_synth.out_dir, "Output directory")->required();
  cmd_synth->add_option("-n,--count", gen_synth.count, "Number of scenes")->check(CLI::NonNegativeNumber);
  cmd_synth->add_option("--size", gen_synth.size, "Scene side length in pixels")->check(CLI::Range(32, 4096));
  cmd_synth->add_option("--objects", gen_synth.objects, "Objects per scene")->check(CLI::NonNegativeNumber);
  cmd_synth->add_option("--horizon", gen_synth.horizon, "Fraction of rows covered by sky")->check(CLI::Range(0.0, 1.0));
  cmd_synth->add_option("--d1", gen_synth.d1, "Boundary dilation disk diameter in pixels")
      ->check(CLI::NonNegativeNumber);

  TrainOptions train;
  auto& sched = train.cfg.schedule;
  auto& weights = train.cfg.weights;
  auto* cmd_train = app.add_subcommand("train", "Two-phase training from a dataset manifest");
  cmd_train->add_option("--manifest", train.manifest, "JSON-lines manifest of {hr, obb} entries")->required();
  cmd_train->add_option("--out-dir", train.out_dir, "Directory for checkpoints and the training log")->required();
  cmd_train->add_option("--pretrain-epochs", sched.pretrain_epochs, "MSE-only pretraining epochs")
      ->check(CLI::NonNegativeNumber);
  cmd_train->add_option("--main-epochs", sched.main_epochs, "Adversarial + targeted perceptual epochs")
      ->check(CLI::NonNegativeNumber);
  cmd_train->add_option("--lr", sched.lr0, "Initial learning rate")->check(CLI::NonNegativeNumber);
  cmd_train->add_option("--lr-decay", sched.decay_factor, "Multiplicative learning-rate decay");
  cmd_train->add_option("--decay-every", sched.decay_every, "Epochs between decays")->check(CLI::PositiveNumber);
  cmd_train->add_option("--batch-size", sched.batch_size, "Patches per batch")->check(CLI::PositiveNumber);
  cmd_train->add_option("--alpha", weights.alpha, "Boundary perceptual weight (relu2_2)");
  cmd_train->add_option("--beta", weights.beta, "Background perceptual weight (relu4_3)");
  cmd_train->add_option("--w-mse", weights.w_mse, "Pixel MSE weight");
  cmd_train->add_option("--w-adv", weights.w_adv, "Adversarial weight");
  cmd_train->add_option("--vgg-weights", train.vgg_weights, "Pretrained VGG-16 weight archive (surrogate if empty)");
  cmd_train->add_option("--surrogate-seed", train.cfg.extractor.seed, "Seed of the surrogate feature extractor");
  cmd_train->add_option("--patch-size", train.cfg.patch_size, "HR training patch side")->check(CLI::PositiveNumber);
  cmd_train->add_option("--residual-blocks", train.cfg.generator.n_residual_blocks, "Generator residual blocks")
      ->check(CLI::NonNegativeNumber);
  cmd_train->add_option("--skip", train.skip, "Global skip: add or concat")->check(CLI::IsMember({"add", "concat"}));
  cmd_train->add_option("--resume", train.resume, "Checkpoint to resume from");

  SrOptions sr;
  auto* cmd_sr = app.add_subcommand("sr", "Super-resolve LR images with a trained checkpoint");
  cmd_sr->add_option("--checkpoint", sr.checkpoint, "Checkpoint file")->required();
  cmd_sr->add_option("--input", sr.inputs, "LR PNG(s)")->required();
  cmd_sr->add_option("--out-dir", sr.out_dir, "Output directory for SR PNGs")->required();

  EvalOptions eval;
  auto* cmd_eval = app.add_subcommand("eval", "PSNR/SSIM (global and per OBB region) as CSV");
  cmd_eval->add_option("--sr-dir", eval.sr_dir, "Directory of SR PNGs")->required();
  cmd_eval->add_option("--hr-dir", eval.hr_dir, "Directory of HR PNGs with matching names")->required();
  cmd_eval->add_option("--obb-dir", eval.obb_dir, "Optional directory of OBB labels for region scores");
  cmd_eval->add_option("--out", eval.out, "CSV output path, '-' for stdout");
  cmd_eval->add_option("--color", eval.color, "Metric color space: rgb or luma")->check(CLI::IsMember({"rgb", "luma"}));
  cmd_eval->add_option("--shave", eval.shave, "Border pixels excluded from metrics")->check(CLI::NonNegativeNumber);

  BenchOptions bench;
  auto* cmd_bench = app.add_subcommand("bench", "Measure generator inference throughput");
  cmd_bench->add_option("--checkpoint", bench.checkpoint, "Checkpoint file")->required();
  cmd_bench->add_option("--width", bench.width, "LR input width")->check(CLI::PositiveNumber);
  cmd_bench->add_option("--height", bench.height, "LR input height")->check(CLI::PositiveNumber);
  cmd_bench->add_option("--repeats", bench.repeats, "Timed forward passes")->check(CLI::PositiveNumber);
  cmd_bench->add_option("--warmup", bench.warmup, "Untimed warm-up passes")->check(CLI::NonNegativeNumber);
  cmd_bench->add_option("--out", bench.out, "JSON output path, '-' for stdout");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const CLI::App* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    log::set_level(g.log_level);
    torch::set_num_threads(g.threads);
    log::info("effective configuration: " + JsonConfig::collect(&app, true).dump());

    const CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "make-obb") run_make_obb(make_obb);
    else if (name == "gen-synth") run_gen_synth(gen_synth, g);
    else if (name == "train") run_train(train, g);
    else if (name == "sr") run_sr(sr);
    else if (name == "eval") run_eval(eval, out);
    else if (name == "bench") run_bench(bench, out);
    return kOk;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace tpsr::cli
