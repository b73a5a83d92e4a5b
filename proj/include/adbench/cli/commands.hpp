// Copyright 2026 The adbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command implementations behind the `adbench` executable: evaluation runs,
// synthetic fixtures, timing, dataset building and statistics, and the
// feature-inversion demo. Every command writes its reports through the same
// emitters so the byte layout is stable.

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adbench/cocoad/coco.hpp"
#include "adbench/cocoad/splits.hpp"
#include "adbench/cocoad/stats.hpp"
#include "adbench/data/manifest.hpp"
#include "adbench/data/mask_io.hpp"
#include "adbench/error.hpp"
#include "adbench/invad/toy.hpp"
#include "adbench/metrics/evaluate.hpp"
#include "adbench/metrics/record.hpp"
#include "adbench/parallel.hpp"

namespace adbench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// Process exit codes. These values are part of the public interface.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitMetric = 3,
};

inline int exit_code_for(const Error& e) {
  if (e.is_validation()) return kExitValidation;
  switch (e.code()) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kShapeMismatch:
      return kExitValidation;
    case ErrorCode::kPrecondition:
    case ErrorCode::kDegenerateLabels:
      return kExitMetric;
    default:
      return kExitFailure;
  }
}

enum class ReportFormat { kJson, kMarkdown, kBoth };

inline ReportFormat parse_format(const std::string& text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "md") return ReportFormat::kMarkdown;
  if (text == "both") return ReportFormat::kBoth;
  fail(ErrorCode::kInvalidArgument, "format must be json, md or both, got '" + text + "'");
}

inline NormalizationScope parse_norm(const std::string& text) {
  if (text == "category") return NormalizationScope::kCategory;
  if (text == "dataset") return NormalizationScope::kDataset;
  fail(ErrorCode::kInvalidArgument, "norm must be category or dataset, got '" + text + "'");
}

inline ProFprMode parse_pro_fpr(const std::string& text) {
  if (text == "pooled") return ProFprMode::kPooled;
  if (text == "per-image") return ProFprMode::kPerImage;
  fail(ErrorCode::kInvalidArgument, "pro-fpr must be pooled or per-image, got '" + text + "'");
}

/// Everything a command needs. Defaults: band 0.2:0.8:0.1, FPR cap 0.3,
/// category normalization, max image score, exact ranking (histogram off,
/// 100000 bins when enabled), one worker, seed 0, JSON and markdown.
struct RunConfig {
  std::string command;
  fs::path input;
  fs::path output;
  std::string band = "0.2:0.8:0.1";
  double fpr_cap = 0.3;
  std::string norm = "category";
  std::string image_score = "max";
  std::string pro_fpr = "pooled";
  bool histogram = false;
  std::size_t hist_bins = 100000;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::string format = "both";

  // synth
  std::string fixture = "demo";
  std::size_t images = 8;
  std::size_t size = 64;
  // timing
  std::size_t pixels = 1000000;
  // build-cocoad
  std::string split = "all";
  bool exclude_crowd = false;
  bool include_unannotated = false;
  bool per_class = false;
  // invad-demo
  std::size_t epochs = 40;

  EvalOptions eval_options() const {
    EvalOptions o;
    o.band = parse_band(band);
    o.fpr_cap = fpr_cap;
    o.pro_mode = parse_pro_fpr(pro_fpr);
    o.image_score = parse_image_score_mode(image_score);
    if (histogram) o.histogram_bins = hist_bins;
    return o;
  }

  /// Throws kInvalidArgument on the first bad field.
  void validate() const {
    static const std::array<const char*, 6> kCommands = {"eval",  "synth",     "timing",
                                                         "stats", "build-cocoad", "invad-demo"};
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
      fail(ErrorCode::kInvalidArgument, "unknown command '" + command + "'");
    }
    (void)eval_options();
    if (!(fpr_cap > 0.0 && fpr_cap <= 1.0)) fail(ErrorCode::kInvalidArgument, "fpr-cap must lie in (0, 1]");
    (void)parse_norm(norm);
    (void)parse_format(format);
    if (hist_bins < 2) fail(ErrorCode::kInvalidArgument, "hist-bins must be at least 2");
    if (workers == 0) fail(ErrorCode::kInvalidArgument, "workers must be at least 1");
    const bool needs_input = command == "eval" || command == "stats" || command == "build-cocoad";
    if (needs_input && input.empty()) fail(ErrorCode::kInvalidArgument, command + " needs an input path");
    const bool needs_output = command == "synth" || command == "build-cocoad" || command == "invad-demo";
    if (needs_output && output.empty()) fail(ErrorCode::kInvalidArgument, command + " needs --out");
    if (command == "synth") {
      if (fixture != "demo" && fixture != "perfect" && fixture != "constant" && fixture != "noisy") {
        fail(ErrorCode::kInvalidArgument, "fixture must be demo, perfect, constant or noisy");
      }
      if (images < 2) fail(ErrorCode::kInvalidArgument, "a fixture category needs at least 2 images");
      if (size < 8) fail(ErrorCode::kInvalidArgument, "fixture maps must be at least 8x8");
    }
    if (command == "timing" && input.empty() && pixels == 0) fail(ErrorCode::kInvalidArgument, "pixels must be positive");
    if (command == "build-cocoad" && split != "all" &&
        (split.size() != 1 || split[0] < '0' || split[0] >= static_cast<char>('0' + coco::kSplitCount))) {
      fail(ErrorCode::kInvalidArgument, "split must be 0-3 or all");
    }
    if (command == "invad-demo" && epochs == 0) fail(ErrorCode::kInvalidArgument, "epochs must be positive");
  }
};

// ---------------------------------------------------------------------------
// Report emission

inline std::string markdown_table(const std::vector<std::pair<std::string, MetricRecord>>& rows) {
  std::ostringstream md;
  md << "| Category |";
  for (const auto& f : kMetricFields) md << ' ' << f.label << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < std::size(kMetricFields); ++i) md << "---:|";
  md << '\n';
  for (const auto& [name, rec] : rows) {
    md << "| " << name << " |";
    for (const auto& f : kMetricFields) md << ' ' << format_fixed(rec.*f.member) << " |";
    md << '\n';
  }
  return md.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

inline std::string json_text(const json& doc) { return doc.dump(2) + "\n"; }

/// Writes `stem`.json / `stem`.md under `dir`, or prints to `out` when dir is empty.
inline void emit(const json& doc, const std::string& markdown, const fs::path& dir, const std::string& stem,
                 ReportFormat format, std::ostream& out) {
  const bool want_json = format != ReportFormat::kMarkdown;
  const bool want_md = format != ReportFormat::kJson && !markdown.empty();
  if (dir.empty()) {
    if (want_json) out << json_text(doc);
    if (want_md) out << markdown;
    return;
  }
  if (want_json) write_text(dir / (stem + ".json"), json_text(doc));
  if (want_md) write_text(dir / (stem + ".md"), markdown);
}

// ---------------------------------------------------------------------------
// eval

inline json settings_json(const RunConfig& c) {
  const ThresholdBandConfig band = parse_band(c.band);
  return json{{"band", {{"start", band.start}, {"end", band.end}, {"step", band.step}}},
              {"fpr_cap", c.fpr_cap},
              {"norm", c.norm},
              {"image_score", c.image_score},
              {"pro_fpr", c.pro_fpr},
              {"histogram_bins", c.histogram ? json(c.hist_bins) : json(nullptr)}};
}

struct CategoryResult {
  std::string name;
  std::size_t images = 0;
  MetricRecord record;
  std::vector<std::string> warnings;
};

/// Evaluates every category of a loaded manifest. Categories run on the
/// worker pool; results land in manifest order.
inline std::vector<CategoryResult> evaluate_manifest(const DatasetManifest& manifest, const RunConfig& c) {
  const EvalOptions options = c.eval_options();
  const NormalizationScope scope = parse_norm(c.norm);
  const std::size_t n = manifest.categories.size();

  std::optional<ScoreRange> global;
  if (scope == NormalizationScope::kDataset) {
    std::vector<ScoreRange> ranges(n);
    parallel_for(n, c.workers, [&](std::size_t i) { ranges[i] = score_range(load_category(manifest.categories[i])); });
    ScoreRange all;
    for (const auto& r : ranges) {
      all.min = std::min(all.min, r.min);
      all.max = std::max(all.max, r.max);
    }
    global = all;
  }

  std::vector<CategoryResult> results(n);
  parallel_for(n, c.workers, [&](std::size_t i) {
    const CategoryEvalSet raw = load_category(manifest.categories[i]);
    CategoryResult& r = results[i];
    r.name = raw.category;
    r.images = raw.images.size();
    const CategoryEvalSet norm =
        global ? normalize_scores(raw, *global, &r.warnings) : normalize_category_scores(raw, &r.warnings);
    r.record = evaluate_normalized_category(norm, options);
  });
  return results;
}

inline json eval_report(const DatasetManifest& manifest, const std::vector<CategoryResult>& results,
                        const RunConfig& c) {
  json cats = json::array();
  std::vector<MetricRecord> records;
  for (const auto& r : results) {
    cats.push_back({{"name", r.name}, {"images", r.images}, {"metrics", r.record}, {"warnings", r.warnings}});
    records.push_back(r.record);
  }
  return json{{"dataset", manifest.name},
              {"settings", settings_json(c)},
              {"categories", std::move(cats)},
              {"mean", aggregate_dataset(records)}};
}

inline std::string eval_markdown(const DatasetManifest& manifest, const std::vector<CategoryResult>& results) {
  std::vector<std::pair<std::string, MetricRecord>> rows;
  std::vector<MetricRecord> records;
  for (const auto& r : results) {
    rows.emplace_back(r.name, r.record);
    records.push_back(r.record);
  }
  rows.emplace_back("mean", aggregate_dataset(records));
  return "# " + manifest.name + "\n\n" + markdown_table(rows);
}

// ---------------------------------------------------------------------------
// synth

enum class SynthKind { kPerfect, kConstant, kNoisy };

/// One seeded category: the first half of the images are normal, the rest
/// carry one to three rectangular defects.
inline CategoryEvalSet synthetic_category(const std::string& name, SynthKind kind, std::size_t images,
                                          std::size_t height, std::size_t width, std::mt19937_64& rng) {
  CategoryEvalSet set;
  set.category = name;
  std::normal_distribution<double> noise(0.0, 0.25);
  for (std::size_t k = 0; k < images; ++k) {
    EvalImage im;
    im.id = name + "_" + std::to_string(k);
    im.label = k < images / 2 ? ImageLabel::kNormal : ImageLabel::kAnomalous;
    im.mask = BinaryMask(height, width);
    if (im.label == ImageLabel::kAnomalous) {
      const std::size_t regions = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
      for (std::size_t r = 0; r < regions; ++r) {
        std::uniform_int_distribution<std::size_t> hh(std::max<std::size_t>(1, height / 16), height / 4);
        std::uniform_int_distribution<std::size_t> ww(std::max<std::size_t>(1, width / 16), width / 4);
        const std::size_t rh = hh(rng), rw = ww(rng);
        const std::size_t y0 = std::uniform_int_distribution<std::size_t>(0, height - rh)(rng);
        const std::size_t x0 = std::uniform_int_distribution<std::size_t>(0, width - rw)(rng);
        for (std::size_t y = y0; y < y0 + rh; ++y)
          for (std::size_t x = x0; x < x0 + rw; ++x) im.mask.set(y, x, true);
      }
    }
    std::vector<double> scores(height * width);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      switch (kind) {
        case SynthKind::kPerfect: scores[i] = im.mask[i] ? 1.0 : 0.0; break;
        case SynthKind::kConstant: scores[i] = 0.5; break;
        // Rounded to float so the written f32 maps reload to the same values.
        case SynthKind::kNoisy:
          scores[i] = static_cast<float>((im.mask[i] ? 0.55 : 0.0) + noise(rng));
          break;
      }
    }
    im.map = ScoreMap(height, width, std::move(scores));
    set.images.push_back(std::move(im));
  }
  return set;
}

/// Values that follow in closed form from the fixture construction.
inline json planted_values(SynthKind kind, const CategoryEvalSet& set, double fpr_cap) {
  json j;
  if (kind == SynthKind::kPerfect) {
    for (const auto& f : kMetricFields) j[f.key] = 100.0;
    return j;
  }
  if (kind != SynthKind::kConstant) return nullptr;
  // Constant scores: every threshold either takes all pixels or none.
  double pos = 0.0, total = 0.0, anomalous = 0.0;
  for (const auto& im : set.images) {
    pos += static_cast<double>(im.mask.count());
    total += static_cast<double>(im.mask.size());
    anomalous += im.label == ImageLabel::kAnomalous ? 1.0 : 0.0;
  }
  const double p = pos / total;
  const double q = anomalous / static_cast<double>(set.images.size());
  j = {{"image_auroc", 50.0},
       {"image_ap", 100.0 * q},
       {"image_f1max", 100.0 * 2.0 * q / (1.0 + q)},
       {"aupro", 100.0 * fpr_cap / 2.0},
       {"pixel_auroc", 50.0},
       {"pixel_ap", 100.0 * p},
       {"pixel_f1max", 100.0 * 2.0 * p / (1.0 + p)},
       {"mf1_band", 0.0},
       {"macc_band", 0.0},
       {"miou_band", 0.0},
       {"ioumax", 100.0 * p}};
  return j;
}

/// Writes score maps (f32 ADTB), masks (PGM) and manifest.json under `root`.
/// Normal images get no mask file.
inline void write_category_files(const CategoryEvalSet& set, const fs::path& root, json& categories,
                                 DType dtype = DType::kF32) {
  json records = json::array();
  fs::create_directories(root / "pred" / set.category);
  for (const auto& im : set.images) {
    const std::string map_rel = "pred/" + set.category + "/" + im.id + ".adtb";
    write_score_map(im.map, root / map_rel, dtype);
    json rec{{"id", im.id}, {"label", to_string(im.label)}, {"score_map", map_rel}};
    if (im.label == ImageLabel::kAnomalous) {
      const std::string mask_rel = "gt/" + set.category + "/" + im.id + ".pgm";
      fs::create_directories((root / mask_rel).parent_path());
      write_pgm_mask(im.mask, root / mask_rel);
      rec["mask"] = mask_rel;
    }
    records.push_back(std::move(rec));
  }
  categories.push_back({{"name", set.category}, {"records", std::move(records)}});
}

inline json synth_fixture(const RunConfig& c) {
  std::vector<std::pair<std::string, SynthKind>> plan;
  if (c.fixture == "demo" || c.fixture == "perfect") plan.emplace_back("perfect", SynthKind::kPerfect);
  if (c.fixture == "demo" || c.fixture == "constant") plan.emplace_back("constant", SynthKind::kConstant);
  if (c.fixture == "demo" || c.fixture == "noisy") {
    plan.emplace_back("noisy_a", SynthKind::kNoisy);
    plan.emplace_back("noisy_b", SynthKind::kNoisy);
  }
  std::mt19937_64 rng(c.seed);
  json categories = json::array();
  json planted = json::object();
  for (const auto& [name, kind] : plan) {
    const CategoryEvalSet set = synthetic_category(name, kind, c.images, c.size, c.size, rng);
    write_category_files(set, c.output, categories);
    const json values = planted_values(kind, set, c.fpr_cap);
    if (!values.is_null()) planted[name] = values;
  }
  const json manifest{{"name", "synth-" + c.fixture}, {"categories", std::move(categories)}};
  write_text(c.output / "manifest.json", json_text(manifest));
  const json expected{{"fpr_cap", c.fpr_cap}, {"seed", c.seed}, {"planted", planted}};
  write_text(c.output / "expected.json", json_text(expected));
  return expected;
}

// ---------------------------------------------------------------------------
// timing

struct TimingResult {
  std::size_t pixels = 0;
  double pixel_triple_s = 0.0;    // exact, sort-based
  double pixel_histogram_s = 0.0;  // quantized
  double band_s = 0.0;
  double aupro_s = 0.0;

  double band_speedup() const { return pixel_triple_s / band_s; }
  double histogram_speedup() const { return pixel_triple_s / pixel_histogram_s; }
};

/// A single normalized category of about `pixels` pixels in 256x256 maps.
inline CategoryEvalSet timing_fixture(std::size_t pixels, std::uint64_t seed) {
  constexpr std::size_t kSide = 256;
  const std::size_t images = std::max<std::size_t>(2, (pixels + kSide * kSide - 1) / (kSide * kSide));
  std::mt19937_64 rng(seed);
  const CategoryEvalSet raw = synthetic_category("timing", SynthKind::kNoisy, images, kSide, kSide, rng);
  return normalize_category_scores(raw);
}

/// Times the metric families on one normalized category. `with_aupro` can be
/// switched off when only the ranking/band ratio is of interest.
inline TimingResult time_metrics(const CategoryEvalSet& set, const EvalOptions& options, bool with_aupro = true) {
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
  TimingResult t;
  for (const auto& im : set.images) t.pixels += im.map.size();
  volatile double sink = 0.0;
  auto t0 = clock::now();
  sink = sink + eval_pixel_level(set).auroc;
  auto t1 = clock::now();
  sink = sink + eval_pixel_level(set, options.histogram_bins.value_or(100000)).auroc;
  auto t2 = clock::now();
  sink = sink + eval_threshold_band(set, options.band).mf1;
  auto t3 = clock::now();
  if (with_aupro) sink = sink + eval_aupro(set, options.fpr_cap, options.pro_mode, options.connectivity);
  auto t4 = clock::now();
  t.pixel_triple_s = seconds(t0, t1);
  t.pixel_histogram_s = seconds(t1, t2);
  t.band_s = seconds(t2, t3);
  t.aupro_s = seconds(t3, t4);
  return t;
}

inline json timing_json(const TimingResult& t) {
  return json{{"pixels", t.pixels},
              {"seconds",
               {{"pixel_triple_sort", t.pixel_triple_s},
                {"pixel_triple_histogram", t.pixel_histogram_s},
                {"band", t.band_s},
                {"aupro", t.aupro_s}}},
              {"ratios", {{"sort_over_band", t.band_speedup()}, {"sort_over_histogram", t.histogram_speedup()}}}};
}

// ---------------------------------------------------------------------------
// build-cocoad

/// Image counts (train, test normal, test anomalous) per split as published.
inline constexpr std::array<std::array<std::size_t, 3>, coco::kSplitCount> kPublishedSplitCounts = {{
    {30438, 1291, 3661},
    {65133, 2785, 2167},
    {79083, 3328, 1624},
    {77580, 3253, 1699},
}};

inline fs::path find_annotation_file(const fs::path& root, const std::string& name) {
  for (const fs::path& p : {root / "annotations" / name, root / name}) {
    if (fs::is_regular_file(p)) return p;
  }
  fail(ErrorCode::kIo, "cannot find " + name + " under " + root.string());
}

/// Builds the requested splits and returns the build report, which lists
/// every split whose counts differ from the published ones.
inline json build_cocoad(const RunConfig& c, std::ostream& log) {
  const fs::path train_file = find_annotation_file(c.input, "instances_train2017.json");
  const fs::path val_file = find_annotation_file(c.input, "instances_val2017.json");
  log << "parsing " << val_file.string() << '\n';
  const coco::CocoDataset val = coco::parse_coco(val_file);
  log << "parsing " << train_file.string() << '\n';
  const coco::CocoDataset train = coco::parse_coco(train_file, {.keep_segmentation = false});
  const auto splits = coco::assign_splits(val.categories);

  coco::BuildSplitOptions options;
  options.include_crowd = !c.exclude_crowd;
  options.include_unannotated = c.include_unannotated;
  options.per_class = c.per_class;
  options.workers = c.workers;

  json reports = json::array();
  json deviations = json::array();
  for (const auto& split : splits) {
    if (c.split != "all" && std::to_string(split.index) != c.split) continue;
    const coco::BuildResult res = coco::build_split(train, val, split, c.output, options);
    const auto& want = kPublishedSplitCounts[split.index];
    const std::array<std::size_t, 3> got = {res.report.train, res.report.test_normal, res.report.test_anomaly};
    json entry = res.report;
    entry["published"] = {{"train", want[0]}, {"test_normal", want[1]}, {"test_anomaly", want[2]}};
    entry["matches_published"] = got == want;
    if (got != want) {
      deviations.push_back({{"split", split.index},
                            {"train", static_cast<long long>(got[0]) - static_cast<long long>(want[0])},
                            {"test_normal", static_cast<long long>(got[1]) - static_cast<long long>(want[1])},
                            {"test_anomaly", static_cast<long long>(got[2]) - static_cast<long long>(want[2])}});
    }
    log << "split " << split.index << ": train " << got[0] << ", test normal " << got[1] << ", test anomalous "
        << got[2] << (got == want ? "" : "  (differs from published counts)") << '\n';
    reports.push_back(std::move(entry));
  }
  const json doc{{"options",
                  {{"exclude_crowd", c.exclude_crowd},
                   {"include_unannotated", c.include_unannotated},
                   {"per_class", c.per_class}}},
                 {"splits", std::move(reports)},
                 {"deviations", std::move(deviations)}};
  write_text(c.output / "build_report.json", json_text(doc));
  return doc;
}

// ---------------------------------------------------------------------------
// invad-demo

/// Trains the toy pipeline and writes its maps as an evaluable fixture:
/// pred/ (f64 ADTB), gt/ (PGM), manifest.json, plus the record and losses.
inline json invad_demo(const RunConfig& c) {
  invad::ToyRunOptions o;
  o.epochs = c.epochs;
  o.workers = c.workers;
  const invad::ToyRun run = invad::toy_train_detect(c.seed, o);
  json categories = json::array();
  write_category_files(run.eval, c.output, categories, DType::kF64);
  const json manifest{{"name", "invad-demo"}, {"categories", std::move(categories)}};
  write_text(c.output / "manifest.json", json_text(manifest));
  return json{{"seed", c.seed}, {"epochs", c.epochs}, {"epoch_loss", run.epoch_loss}, {"metrics", run.record}};
}

// ---------------------------------------------------------------------------
// Entry points. Each validates the config first and maps errors to exit codes.

inline int guarded(const RunConfig& c, std::ostream& err, const std::function<void()>& body) {
  try {
    c.validate();
    body();
    return kExitOk;
  } catch (const Error& e) {
    err << "adbench " << c.command << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "adbench " << c.command << ": " << e.what() << '\n';
    return kExitFailure;
  }
}

inline int run_eval(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(c, err, [&] {
    const DatasetManifest manifest = load_manifest(c.input);
    const auto results = evaluate_manifest(manifest, c);
    for (const auto& r : results)
      for (const auto& w : r.warnings) err << "warning: " << w << '\n';
    emit(eval_report(manifest, results, c), eval_markdown(manifest, results), c.output, "report",
         parse_format(c.format), out);
  });
}

inline int run_synth(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(c, err, [&] {
    synth_fixture(c);
    out << "wrote " << (c.output / "manifest.json").string() << '\n';
  });
}

inline int run_timing(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(c, err, [&] {
    const EvalOptions options = c.eval_options();
    json doc;
    if (c.input.empty()) {
      doc = timing_json(time_metrics(timing_fixture(c.pixels, c.seed), options));
    } else {
      const DatasetManifest manifest = load_manifest(c.input);
      json cats = json::array();
      for (const auto& desc : manifest.categories) {
        json t = timing_json(time_metrics(normalize_category_scores(load_category(desc)), options));
        t["name"] = desc.name;
        cats.push_back(std::move(t));
      }
      doc = json{{"dataset", manifest.name}, {"categories", std::move(cats)}};
    }
    emit(doc, "", c.output, "timing", ReportFormat::kJson, out);
  });
}

inline int run_stats(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(c, err, [&] {
    const DatasetManifest manifest = load_manifest(c.input, {.require_predictions = false});
    json doc = coco::dataset_statistics(manifest);
    doc["dataset"] = manifest.name;
    emit(doc, "", c.output, "stats", ReportFormat::kJson, out);
  });
}

inline int run_build_cocoad(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(c, err, [&] { build_cocoad(c, out); });
}

inline int run_invad_demo(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(c, err, [&] {
    const json doc = invad_demo(c);
    const MetricRecord rec = doc.at("metrics").get<MetricRecord>();
    emit(doc, markdown_table({{"toy", rec}}), c.output, "record", parse_format(c.format), out);
    out << "pixel AU-ROC " << format_fixed(rec.pixel_auroc) << '\n';
  });
}

inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  if (c.command == "eval") return run_eval(c, out, err);
  if (c.command == "synth") return run_synth(c, out, err);
  if (c.command == "timing") return run_timing(c, out, err);
  if (c.command == "stats") return run_stats(c, out, err);
  if (c.command == "build-cocoad") return run_build_cocoad(c, out, err);
  if (c.command == "invad-demo") return run_invad_demo(c, out, err);
  return guarded(c, err, [] {});
}

}  // namespace adbench::cli
