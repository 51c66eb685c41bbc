// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "oracles/oracles.hpp"
#include "support.hpp"
#include "tpsr/checkpoint.hpp"
#include "tpsr/error.hpp"
#include "tpsr/features.hpp"
#include "tpsr/losses.hpp"
#include "tpsr/metrics.hpp"
#include "tpsr/networks.hpp"
#include "tpsr/obb.hpp"
#include "tpsr/patch.hpp"
#include "tpsr/resize.hpp"
#include "tpsr/synthetic.hpp"
#include "tpsr/tensor_convert.hpp"
#include "tpsr/trainer.hpp"

using namespace tpsr;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

// Background ids of testing::small_taxonomy(), listed by hand.
const std::set<std::int32_t> kSmallBackgroundIds = {0, 1, 3, 5};

MaskSet random_mask_set(int h, int w, std::mt19937_64& rng) {
  const auto ids = testing::random_class_ids(h, w, 6, rng);
  return masks_from_obb(build_obb_label({ids, testing::small_taxonomy()}, BackgroundClassSet()));
}

torch::Tensor image_batch(const ImageTensor& img, torch::ScalarType dtype = torch::kFloat32) {
  return to_tensor(img, dtype);
}

bool archives_equal(const TensorArchive& a, const TensorArchive& b, const std::string& prefix, std::string& diff) {
  bool any = false;
  for (const auto& name : a.names()) {
    if (name.rfind(prefix, 0) != 0) continue;
    any = true;
    if (!b.contains(name) || !torch::equal(a.at(name), b.at(name))) {
      diff = name;
      return false;
    }
  }
  for (const auto& name : b.names()) {
    if (name.rfind(prefix, 0) == 0 && !a.contains(name)) {
      diff = name;
      return false;
    }
  }
  if (!any) diff = "no tensors under " + prefix;
  return any;
}

// --- 1 ----------------------------------------------------------------------

Verdict obb_oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  const auto tax = testing::small_taxonomy();
  std::int64_t mismatches = 0, pixels = 0;
  for (int i = 0; i < 100; ++i) {
    const int h = std::uniform_int_distribution<int>(1, 64)(rng);
    const int w = std::uniform_int_distribution<int>(1, 64)(rng);
    const int classes = std::uniform_int_distribution<int>(1, 6)(rng);
    const auto ids = testing::random_class_ids(h, w, classes, rng);
    const auto lib = build_obb_label({ids, tax}, BackgroundClassSet());
    const auto ref = oracle::obb_label(ids, kSmallBackgroundIds, 2.0);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) mismatches += lib(y, x) != ref(y, x);
    pixels += static_cast<std::int64_t>(h) * w;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0, std::to_string(mismatches) + " mismatching of " + std::to_string(pixels) +
                                              " pixels, " + fmt(secs, 3) + " s (limit 10 s)"};
}

// --- 2 ----------------------------------------------------------------------

Verdict identity_zero() {
  const auto fx = FeatureExtractor::surrogate(11);
  std::mt19937_64 rng(202);
  LossWeights w;
  int nonzero = 0;
  for (int i = 0; i < 20; ++i) {
    const int h = std::uniform_int_distribution<int>(8, 40)(rng);
    const int wd = std::uniform_int_distribution<int>(8, 40)(rng);
    const auto img = testing::random_image(h, wd, rng);
    const MaskSet ms = random_mask_set(h, wd, rng);
    const auto masks = MaskTensors::from_mask_sets(std::span<const MaskSet>(&ms, 1));
    const auto hr = image_batch(img);
    const auto sr = hr.clone();
    const auto terms = targeted_perceptual_loss(fx, sr, hr, masks, w);
    if (terms.weighted.item<double>() != 0.0 || terms.boundary.item<double>() != 0.0 ||
        terms.background.item<double>() != 0.0) {
      ++nonzero;
    }
  }
  return {nonzero == 0, std::to_string(nonzero) + " of 20 cases non-zero"};
}

// --- 3 ----------------------------------------------------------------------

int support_violations(const FeatureExtractor& fx, std::mt19937_64& rng) {
  int violations = 0;
  std::normal_distribution<float> noise(0.0f, 0.3f);
  for (int i = 0; i < 20; ++i) {
    const int h = std::uniform_int_distribution<int>(8, 40)(rng);
    const int w = std::uniform_int_distribution<int>(8, 40)(rng);
    const auto hr_img = testing::random_image(h, w, rng);
    const auto sr_img = testing::random_image(h, w, rng);
    const MaskSet ms = random_mask_set(h, w, rng);
    const auto hr = image_batch(hr_img);
    const auto sr = image_batch(sr_img);
    for (const auto& [mask, tap] : {std::pair{&ms.boundary, kBoundaryTap}, std::pair{&ms.background, kBackgroundTap}}) {
      ImageTensor perturbed = sr_img;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if (!(*mask)(y, x))
            for (int c = 0; c < 3; ++c) perturbed(y, x, c) += noise(rng);
      const auto m = mask_to_tensor(*mask);
      const double before = masked_feature_distance(fx, sr, hr, m, tap).item<double>();
      const double after = masked_feature_distance(fx, image_batch(perturbed), hr, m, tap).item<double>();
      if (before != after) ++violations;
    }
  }
  return violations;
}

Verdict mask_support_invariance() {
  testing::TempDir dir("tpsr-accept");
  const auto surrogate = FeatureExtractor::surrogate(13);
  surrogate.save(dir / "vgg.tpsr");
  const auto pretrained = FeatureExtractor::pretrained(dir / "vgg.tpsr");
  std::mt19937_64 rng(303);
  const int s = support_violations(surrogate, rng);
  const int p = support_violations(pretrained, rng);
  return {s == 0 && p == 0 && pretrained.mode() == ExtractorMode::kPretrained,
          "surrogate " + std::to_string(s) + "/40 and pretrained " + std::to_string(p) +
              "/40 distances changed"};
}

// --- 4 ----------------------------------------------------------------------

Verdict gradient_check() {
  const auto t0 = Clock::now();
  const auto fx = FeatureExtractor::surrogate(17);
  std::mt19937_64 rng(404);
  const double h = 1e-4;
  double worst = 0.0;
  int checked = 0;
  LossWeights unit;
  unit.alpha = 1.0;
  unit.beta = 1.0;
  unit.w_adv = 1.0;
  for (const LossWeights& w : {LossWeights{}, unit}) {
    for (int trial = 0; trial < 2; ++trial) {
      const auto hr = image_batch(testing::random_image(8, 8, rng), torch::kFloat64);
      const auto sr0 = image_batch(testing::random_image(8, 8, rng), torch::kFloat64);
      const MaskSet ms = random_mask_set(8, 8, rng);
      const auto masks = MaskTensors::from_mask_sets(std::span<const MaskSet>(&ms, 1), torch::kFloat64);
      const auto d_fake = torch::full({1, 1}, 0.3, torch::kFloat64);
      auto loss_at = [&](const torch::Tensor& sr) {
        return total_generator_loss(fx, sr, hr, masks, d_fake, w).total;
      };
      auto sr = sr0.clone().requires_grad_(true);
      loss_at(sr).backward();
      const auto grad = sr.grad().clone();
      torch::NoGradGuard no_grad;
      for (int k = 0; k < 12; ++k) {
        const int c = std::uniform_int_distribution<int>(0, 2)(rng);
        const int y = std::uniform_int_distribution<int>(0, 7)(rng);
        const int x = std::uniform_int_distribution<int>(0, 7)(rng);
        auto plus = sr0.clone();
        auto minus = sr0.clone();
        plus[0][c][y][x] += h;
        minus[0][c][y][x] -= h;
        const double fd = (loss_at(plus).item<double>() - loss_at(minus).item<double>()) / (2.0 * h);
        const double an = grad[0][c][y][x].item<double>();
        const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-12});
        worst = std::max(worst, rel);
        ++checked;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && checked >= 10 && secs < 60.0,
          std::to_string(checked) + " coordinates, max relative error " + fmt(worst, 3) + ", " + fmt(secs, 3) +
              " s (limit 60 s)"};
}

// --- 5 ----------------------------------------------------------------------

Verdict resampler_oracle() {
  std::mt19937_64 rng(505);
  const std::vector<double> scales = {0.25, 1.0 / 3.0, 0.5, 0.75, 1.5, 2.0, 3.0, 4.0};
  double worst = 0.0;
  int cases = 0;
  for (int i = 0; i < 120; ++i) {
    const int h = std::uniform_int_distribution<int>(1, 16)(rng);
    const int w = std::uniform_int_distribution<int>(1, 16)(rng);
    const auto img = testing::random_image(h, w, rng);
    for (const double scale : scales) {
      for (const bool aa : {true, false}) {
        const auto lib = resize_bicubic(img, {scale, aa});
        const auto ref = oracle::resize(img, scale, aa);
        if (!lib.same_shape(ref)) return {false, "shape mismatch at " + std::to_string(h) + "x" + std::to_string(w)};
        for (std::size_t k = 0; k < lib.size(); ++k) {
          worst = std::max(worst, std::abs(static_cast<double>(lib.values()[k]) - ref.values()[k]));
        }
        ++cases;
      }
    }
  }
  return {worst <= 1e-6, std::to_string(cases) + " resizes, max |diff| " + fmt(worst, 3) + " (limit 1e-6)"};
}

// --- 6 ----------------------------------------------------------------------

std::optional<fs::path> find_benchmark_image(const fs::path& dir, const std::string& stem) {
  for (const auto& name : {stem + ".png", stem + "_GT.png", stem + "_HR.png"}) {
    for (const auto& sub : {fs::path(), fs::path("Set5"), fs::path("Set14")}) {
      if (fs::exists(dir / sub / name)) return dir / sub / name;
    }
  }
  return std::nullopt;
}

Verdict bicubic_table_reproduction() {
  const char* env = std::getenv("TPSR_BENCHMARK_DIR");
  if (!env) {
    return {false, "TPSR_BENCHMARK_DIR is not set; the benchmark images baby/baboon are not available offline"};
  }
  struct Target {
    std::string stem;
    double psnr, ssim;
  };
  const std::vector<Target> targets = {{"baby", 30.419, 0.936}, {"baboon", 20.277, 0.645}};
  bool ok = true;
  std::string detail;
  for (const auto& t : targets) {
    const auto path = find_benchmark_image(env, t.stem);
    if (!path) {
      ok = false;
      detail += t.stem + " not found under " + std::string(env) + "; ";
      continue;
    }
    auto hr = load_image(*path);
    hr = hr.crop(0, 0, hr.height() - hr.height() % kScaleFactor, hr.width() - hr.width() % kScaleFactor);
    const auto up = bicubic_round_trip(hr, kScaleFactor);
    const double p = psnr(up, hr);
    const double s = ssim(up, hr);
    const bool hit = std::abs(p - t.psnr) <= 1.0 && std::abs(s - t.ssim) <= 0.02;
    ok = ok && hit;
    detail += t.stem + " PSNR " + fmt(p, 5) + " (target " + fmt(t.psnr, 5) + "), SSIM " + fmt(s, 4) + " (target " +
              fmt(t.ssim, 3) + "); ";
  }
  return {ok, detail};
}

// --- 7 ----------------------------------------------------------------------

Verdict overfit_sanity() {
  const auto t0 = Clock::now();
  synth::SceneSpec spec;
  spec.size = 128;
  spec.seed = 77;
  const auto scene = synth::generate_scene(spec);
  const auto patch = sample_patch_pair(scene.image, build_obb_label(scene.segmentation, BackgroundClassSet()),
                                       std::uint64_t{7}, kHrPatchSize);
  const auto batch = make_batch(std::span<const PatchPair>(&patch, 1));
  TrainConfig cfg;
  cfg.schedule.pretrain_epochs = 1;
  cfg.schedule.main_epochs = 0;
  cfg.schedule.batch_size = 1;
  Trainer trainer(cfg, cfg.extractor.build());
  trainer.begin_epoch(0);
  double first = 0.0, last = 0.0;
  for (int step = 0; step < 500; ++step) {
    const auto rec = trainer.pretrain_step(batch);
    if (step == 0) first = rec.report.mse;
  }
  {
    torch::NoGradGuard no_grad;
    last = pixel_mse(trainer.generator()->forward(batch.lr), batch.hr).item<double>();
  }
  const double secs = seconds_since(t0);
  const double ratio = first / last;
  return {ratio >= 10.0 && secs < 300.0, "pixel_mse " + fmt(first) + " -> " + fmt(last) + " (" + fmt(ratio, 3) +
                                             "x, need >= 10x), " + fmt(secs, 3) + " s (limit 300 s)"};
}

// --- 8 ----------------------------------------------------------------------

std::vector<nlohmann::json> read_log(const fs::path& path) {
  std::vector<nlohmann::json> lines;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(nlohmann::json::parse(line));
  }
  return lines;
}

TrainConfig schedule_config() {
  TrainConfig cfg;
  cfg.schedule.pretrain_epochs = 2;
  cfg.schedule.main_epochs = 4;
  cfg.schedule.decay_every = 3;  // a decay inside the run exercises lr_at at a boundary
  cfg.schedule.batch_size = 2;
  cfg.schedule.seed = 8;
  cfg.generator.n_residual_blocks = 2;
  cfg.patch_size = 32;
  cfg.discriminator.input_size = 32;
  return cfg;
}

Verdict schedule_exactness() {
  testing::TempDir dir("tpsr-accept");
  synth::SceneSpec spec;
  spec.size = 64;
  const auto manifest = synth::generate_corpus(4, spec, dir / "data");
  const TrainConfig cfg = schedule_config();
  std::vector<std::string> problems;

  const auto final_a = run(cfg, manifest, dir / "a");
  const auto log = read_log(dir / "a" / "train_log.jsonl");
  const int steps_per_epoch = 2;
  if (log.size() != static_cast<std::size_t>(cfg.schedule.total_epochs() * steps_per_epoch)) {
    problems.push_back("log has " + std::to_string(log.size()) + " steps");
  }
  int pre_steps = 0, lr_mismatch = 0, activity = 0;
  for (const auto& rec : log) {
    const int epoch = rec.at("epoch").get<int>();
    if (rec.at("lr").get<double>() != lr_at(cfg.schedule, epoch)) ++lr_mismatch;
    if (epoch < cfg.schedule.pretrain_epochs) {
      ++pre_steps;
      const bool quiet = rec.at("phase") == "pretrain" && !rec.at("d_step").get<bool>() &&
                         rec.at("adv_g").get<double>() == 0.0 && rec.at("perc_boundary").get<double>() == 0.0 &&
                         rec.at("perc_background").get<double>() == 0.0;
      if (!quiet) ++activity;
    } else if (rec.at("phase") != "adversarial" || !rec.at("d_step").get<bool>()) {
      ++activity;
    }
  }
  if (pre_steps != cfg.schedule.pretrain_epochs * steps_per_epoch) problems.push_back("wrong pretrain step count");
  if (lr_mismatch) problems.push_back(std::to_string(lr_mismatch) + " logged lr values differ from lr_at");
  if (activity) problems.push_back(std::to_string(activity) + " steps with out-of-phase activity");

  // The discriminator and its optimizer are exactly as initialized at the boundary.
  const auto boundary = load_checkpoint(checkpoint_path(dir / "a", cfg.schedule.pretrain_epochs));
  const auto initial = Trainer(cfg, cfg.extractor.build()).checkpoint();
  std::string diff;
  if (!archives_equal(initial.tensors, boundary.tensors, "discriminator/", diff)) {
    problems.push_back("discriminator changed before the boundary at " + diff);
  }
  if (!archives_equal(initial.tensors, boundary.tensors, "adam_d/", diff) && diff.rfind("no tensors", 0) != 0) {
    problems.push_back("discriminator optimizer state changed before the boundary at " + diff);
  }

  // With adversarial and perceptual weights changed, the pretrained generator is unchanged.
  TrainConfig other = cfg;
  other.weights.alpha = 0.5;
  other.weights.beta = 0.25;
  other.weights.w_adv = 0.7;
  RunOptions stop_at_boundary;
  stop_at_boundary.stop_after_epochs = cfg.schedule.pretrain_epochs;
  const auto other_boundary = load_checkpoint(run(other, manifest, dir / "other", stop_at_boundary));
  if (!archives_equal(boundary.tensors, other_boundary.tensors, "generator/", diff)) {
    problems.push_back("pretrained generator depends on adversarial/perceptual weights at " + diff);
  }

  // Interrupted runs resumed from a pretrain and an adversarial checkpoint.
  const auto final_ckpt = load_checkpoint(final_a);
  for (const int stop : {1, 3}) {
    const auto out = dir / ("resume" + std::to_string(stop));
    RunOptions first;
    first.stop_after_epochs = stop;
    run(cfg, manifest, out, first);
    RunOptions second;
    second.resume_from = checkpoint_path(out, stop);
    const auto resumed = load_checkpoint(run(cfg, manifest, out, second));
    for (const char* prefix : {"generator/", "discriminator/"}) {
      if (!archives_equal(final_ckpt.tensors, resumed.tensors, prefix, diff)) {
        problems.push_back("resume after epoch " + std::to_string(stop) + " differs at " + diff);
      }
    }
  }

  std::string detail = std::to_string(log.size()) + " logged steps, " + std::to_string(pre_steps) +
                       " before the boundary";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

// --- 9 ----------------------------------------------------------------------

Verdict shape_laws() {
  torch::NoGradGuard no_grad;
  Generator gen(GeneratorConfig{});
  init_params(*gen, 9);
  gen->eval();
  std::vector<std::string> problems;
  const std::vector<int> sizes = {16, 24, 33, 50};
  for (const int h : sizes) {
    for (const int w : sizes) {
      const auto out = gen->forward(torch::rand({1, 3, h, w}));
      if (out.size(2) != 4 * h || out.size(3) != 4 * w) {
        problems.push_back(std::to_string(h) + "x" + std::to_string(w) + " -> " + c10::str(out.sizes()));
      }
    }
  }
  Discriminator disc(DiscriminatorConfig{});
  init_params(*disc, 10);
  double lo = 1.0, hi = 0.0;
  for (const bool train : {false, true}) {
    disc->train(train);
    for (const auto& input : {torch::rand({8, 3, 96, 96}), torch::zeros({2, 3, 96, 96}), torch::ones({2, 3, 96, 96})}) {
      const auto p = disc->forward(input);
      lo = std::min(lo, p.min().item<double>());
      hi = std::max(hi, p.max().item<double>());
    }
  }
  if (!(lo > 0.0 && hi < 1.0)) problems.push_back("discriminator range [" + fmt(lo) + ", " + fmt(hi) + "]");
  std::string detail = "16 generator shapes, discriminator outputs in [" + fmt(lo) + ", " + fmt(hi) + "]";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

// --- 10 ---------------------------------------------------------------------

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + TPSR_CLI_PATH + "\" " + args + " >> \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

Verdict end_to_end() {
  const auto t0 = Clock::now();
  testing::TempDir dir("tpsr-accept");
  const auto log = dir / "cli.log";
  const auto data = dir / "data";
  std::vector<std::pair<std::string, int>> codes;
  codes.emplace_back("gen-synth", cli("gen-synth -n 16 --out-dir " + q(data), log));
  codes.emplace_back("make-obb", cli("make-obb --seg-dir " + q(data / "seg") + " --classes " +
                                         q(data / "classes.json") + " --out-dir " + q(dir / "obb"),
                                     log));
  {
    std::ofstream manifest(dir / "manifest.jsonl");
    for (const auto& e : fs::directory_iterator(data / "hr")) {
      manifest << nlohmann::json{{"hr", (data / "hr" / e.path().filename()).string()},
                                 {"obb", (dir / "obb" / e.path().filename()).string()}}
                      .dump()
               << '\n';
    }
  }
  codes.emplace_back("train", cli("train --manifest " + q(dir / "manifest.jsonl") + " --out-dir " + q(dir / "run") +
                                      " --pretrain-epochs 2 --main-epochs 4",
                                  log));
  std::string inputs;
  for (const auto& e : fs::directory_iterator(data / "lr")) inputs += " --input " + q(e.path());
  codes.emplace_back("sr", cli("sr --checkpoint " + q(checkpoint_path(dir / "run", 6)) + inputs + " --out-dir " +
                                   q(dir / "sr"),
                               log));
  codes.emplace_back("eval", cli("eval --sr-dir " + q(dir / "sr") + " --hr-dir " + q(data / "hr") + " --obb-dir " +
                                     q(dir / "obb") + " --out " + q(dir / "metrics.csv"),
                                 log));
  const double secs = seconds_since(t0);

  std::vector<std::string> problems;
  for (const auto& [name, code] : codes) {
    if (code != 0) problems.push_back(name + " exited " + std::to_string(code));
  }
  int rows = 0, region_values = 0, bad = 0;
  std::ifstream csv(dir / "metrics.csv");
  std::string line;
  std::getline(csv, line);
  if (line != "image,psnr,ssim,psnr_object,psnr_background,psnr_boundary") problems.push_back("bad CSV header");
  while (std::getline(csv, line)) {
    ++rows;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    fields.resize(6);
    for (int k = 1; k < 6; ++k) {
      if (fields[k].empty()) {
        if (k < 3) ++bad;
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(fields[k].c_str(), &end);
      if (*end != '\0' || !std::isfinite(v)) ++bad;
      if (k >= 3) ++region_values;
    }
  }
  if (rows != 16) problems.push_back(std::to_string(rows) + " CSV rows");
  if (bad) problems.push_back(std::to_string(bad) + " non-finite or malformed metrics");
  if (region_values == 0) problems.push_back("no region-scoped values");
  if (secs >= 900.0) problems.push_back("too slow");
  std::string detail = std::to_string(rows) + " rows, " + std::to_string(region_values) + " region values, " +
                       fmt(secs, 4) + " s (limit 900 s)";
  for (const auto& p : problems) detail += "; " + p;
  if (!problems.empty()) detail += "; see log " + log.string();
  return {problems.empty(), detail};
}

}  // namespace

int main() {
  torch::set_num_threads(1);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"OBB oracle equivalence", obb_oracle_equivalence},
      {"targeted perceptual identity-zero", identity_zero},
      {"mask-support invariance", mask_support_invariance},
      {"generator loss gradient check", gradient_check},
      {"resampler oracle", resampler_oracle},
      {"bicubic benchmark reproduction", bicubic_table_reproduction},
      {"pretrain overfit sanity", overfit_sanity},
      {"two-phase schedule exactness", schedule_exactness},
      {"shape laws", shape_laws},
      {"end-to-end CLI smoke", end_to_end},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << ": " << criteria[i].first << " -- "
              << v.detail << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
