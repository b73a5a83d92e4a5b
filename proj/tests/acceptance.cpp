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

// Acceptance suite: one PASS / FAIL / SKIP line per criterion.
//
//   acceptance [--only N] [--known-red N,M]
//
// Exits 0 when the set of failing criteria equals the --known-red set, so a
// criterion that is red for a documented reason stays visibly red without
// hiding a new regression (or an unexpected recovery).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "adbench/cli/commands.hpp"
#include "adbench/cocoad/polygon.hpp"
#include "adbench/cocoad/rle.hpp"
#include "adbench/curves.hpp"
#include "adbench/invad/train.hpp"
#include "mini_coco.hpp"
#include "oracles.hpp"

namespace {

using namespace adbench;
namespace fs = std::filesystem;
using nlohmann::json;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass_if(bool ok, const std::string& detail) { return {ok ? Status::kPass : Status::kFail, detail}; }

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// 1. Published aggregates from published triples (MVTec AD, one-class-for-all)

Outcome aggregation_identity() {
  struct Row {
    const char* method;
    MetricParts parts;
    const char* mad_i;
    const char* mad_p;
    const char* mad_band;
  };
  const Row rows[] = {
      {"InvAD", {98.9, 99.6, 98.1, 94.1, 98.2, 57.6, 60.1, 34.6, 46.9, 23.0, 43.7}, "98.9", "72.0", "34.8"},
      {"RD", {94.6, 96.5, 95.2, 91.1, 96.1, 48.6, 53.8, 25.8, 39.8, 16.4, 37.3}, "95.4", "66.2", "27.4"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& row : rows) {
    const MetricRecord r = assemble_record(row.parts);
    const std::string got[] = {format_fixed(r.mad_i), format_fixed(r.mad_p), format_fixed(r.mad_band)};
    const std::string want[] = {row.mad_i, row.mad_p, row.mad_band};
    const bool row_ok = got[0] == want[0] && got[1] == want[1] && got[2] == want[2];
    ok = ok && row_ok;
    if (!detail.empty()) detail += "; ";
    detail += std::string(row.method) + " " + got[0] + "/" + got[1] + "/" + got[2];
    if (!row_ok) detail += " (published " + want[0] + "/" + want[1] + "/" + want[2] + ")";
  }
  return pass_if(ok, detail);
}

// ---------------------------------------------------------------------------
// 2. Mean of the four COCO-AD split records equals the dataset row

Outcome split_mean_identity() {
  const double splits[4][14] = {
      {73.8, 87.8, 85.1, 51.1, 78.9, 42.6, 45.6, 22.3, 39.0, 13.6, 29.6, 82.2, 55.7, 25.0},
      {55.8, 48.4, 60.9, 41.7, 74.3, 8.7, 14.4, 7.1, 38.1, 3.7, 7.8, 55.0, 32.5, 16.3},
      {68.2, 48.0, 55.0, 47.7, 75.7, 16.9, 24.9, 11.3, 38.2, 6.2, 14.2, 57.1, 39.2, 18.6},
      {65.8, 46.8, 55.3, 39.1, 64.1, 10.5, 16.8, 8.9, 34.8, 4.8, 9.2, 56.0, 30.5, 16.2},
  };
  const double published[14] = {65.9, 57.8, 64.1, 44.9, 73.3, 19.7, 25.4, 12.4, 37.5, 7.1, 15.2, 62.6, 39.5, 19.0};
  std::vector<MetricRecord> records(4);
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t f = 0; f < std::size(kMetricFields); ++f) records[s].*kMetricFields[f].member = splits[s][f];
  const MetricRecord mean = aggregate_dataset(records);
  double worst = 0.0;
  std::string worst_key;
  for (std::size_t f = 0; f < std::size(kMetricFields); ++f) {
    const double d = std::abs(mean.*kMetricFields[f].member - published[f]);
    if (d > worst) {
      worst = d;
      worst_key = kMetricFields[f].key;
    }
  }
  // Half a unit in the last printed digit, plus binary representation slack.
  return pass_if(worst <= 0.05 + 1e-9, "14 fields, mAU-ROC " + format_fixed(mean.image_auroc) + ", mIoU-max " +
                                           format_fixed(mean.ioumax) + ", max |diff| " + fmt(worst) + " (" +
                                           worst_key + ")");
}

// ---------------------------------------------------------------------------
// 3. Library metrics vs exhaustive-threshold oracles

struct Instance {
  CategoryEvalSet set;
  std::vector<oracle::ProImage> pro;
  std::vector<double> pixel_scores;
  std::vector<std::uint8_t> pixel_labels;
  std::vector<double> image_scores;
  std::vector<std::uint8_t> image_labels;
};

Instance random_instance(std::mt19937_64& rng) {
  Instance in;
  in.set.category = "random";
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t images = 2 + rng() % 5;
  const bool quantized = rng() % 2 == 0;
  const int levels = 4 + static_cast<int>(rng() % 12);
  std::size_t budget = 512;
  for (std::size_t k = 0; k < images; ++k) {
    const std::size_t h = 2 + rng() % 7;
    const std::size_t w = 2 + rng() % 7;
    if (h * w > budget) break;
    budget -= h * w;
    // Image 0 is normal and image 1 anomalous; the rest are random.
    const bool anomalous = k == 1 || (k > 1 && rng() % 2 == 0);
    std::vector<std::uint8_t> gt(h * w, 0);
    if (anomalous) {
      const double density = 0.1 + 0.5 * unit(rng);
      for (auto& g : gt) g = unit(rng) < density;
      gt[rng() % gt.size()] = 1;
    }
    std::vector<double> s(h * w);
    for (std::size_t i = 0; i < s.size(); ++i) {
      double v = std::min(1.0, unit(rng) * 0.8 + (gt[i] ? 0.25 * unit(rng) : 0.0));
      if (quantized) v = std::floor(v * levels) / levels;
      s[i] = v;
    }
    EvalImage im;
    im.id = std::to_string(k);
    im.label = anomalous ? ImageLabel::kAnomalous : ImageLabel::kNormal;
    im.map = ScoreMap(h, w, s);
    im.mask = BinaryMask(h, w, gt);
    in.set.images.push_back(im);
    in.pro.push_back({h, w, s, gt});
    in.pixel_scores.insert(in.pixel_scores.end(), s.begin(), s.end());
    in.pixel_labels.insert(in.pixel_labels.end(), gt.begin(), gt.end());
    in.image_scores.push_back(*std::max_element(s.begin(), s.end()));
    in.image_labels.push_back(anomalous ? 1 : 0);
  }
  return in;
}

Outcome oracle_equivalence() {
  constexpr int kInstances = 1000;
  constexpr double kTol = 1e-9;
  std::mt19937_64 rng(2024);
  std::map<std::string, double> worst;
  auto track = [&](const std::string& key, double lib_percent, double ref_fraction) {
    worst[key] = std::max(worst[key], std::abs(lib_percent / 100.0 - ref_fraction));
  };
  const double band[] = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  for (int t = 0; t < kInstances; ++t) {
    const Instance in = random_instance(rng);
    const auto& s = in.pixel_scores;
    const auto& y = in.pixel_labels;

    const RankingTriple image = eval_image_level(in.set);
    track("image auroc", image.auroc, oracle::pairwise_auroc(in.image_scores, in.image_labels));
    track("image ap", image.ap, oracle::exhaustive_ap(in.image_scores, in.image_labels));
    track("image f1max", image.f1max, oracle::exhaustive_best(in.image_scores, in.image_labels, false).value);

    const PixelLevelResult pixel = eval_pixel_level_full(in.set);
    track("auroc", pixel.triple.auroc, oracle::pairwise_auroc(s, y));
    track("ap", pixel.triple.ap, oracle::exhaustive_ap(s, y));
    track("f1max", pixel.triple.f1max, oracle::exhaustive_best(s, y, false).value);
    track("ioumax", pixel.ioumax, oracle::exhaustive_best(s, y, true).value);

    double f1 = 0, acc = 0, iou = 0;
    for (double th : band) {
      const oracle::Counts c = oracle::counts_at(s, y, th);
      f1 += 2 * c.tp + c.fp + c.fn > 0 ? 2 * c.tp / (2 * c.tp + c.fp + c.fn) : 0.0;
      acc += c.tp + c.fn > 0 ? c.tp / (c.tp + c.fn) : 0.0;
      iou += c.tp + c.fp + c.fn > 0 ? c.tp / (c.tp + c.fp + c.fn) : 0.0;
    }
    const BandResult b = eval_threshold_band(in.set);
    track("mf1 band", b.mf1, f1 / 7.0);
    track("macc band", b.macc, acc / 7.0);
    track("miou band", b.miou, iou / 7.0);

    track("aupro", eval_aupro(in.set, 0.3), oracle::dense_pro(in.pro, 0.3));
    track("aupro per-image", eval_aupro(in.set, 0.3, ProFprMode::kPerImage), oracle::dense_pro(in.pro, 0.3, true));
  }
  double max_err = 0.0;
  std::string key;
  for (const auto& [k, v] : worst) {
    if (v >= max_err) {
      max_err = v;
      key = k;
    }
  }
  return pass_if(max_err <= kTol, std::to_string(kInstances) + " instances x " + std::to_string(worst.size()) +
                                      " metrics, max |lib - oracle| " + fmt(max_err) + " (" + key + ")");
}

// ---------------------------------------------------------------------------
// 4. Metric identities on random fixtures

CategoryEvalSet random_fixture(std::mt19937_64& rng) {
  return cli::synthetic_category("prop", cli::SynthKind::kNoisy, 4 + rng() % 5, 16 + rng() % 16, 16 + rng() % 16, rng);
}

CategoryEvalSet transform(const CategoryEvalSet& set, const std::function<double(double)>& f) {
  CategoryEvalSet out = set;
  for (auto& im : out.images) {
    std::vector<double> s = im.map.scores();
    for (auto& v : s) v = f(v);
    im.map = ScoreMap(im.map.height(), im.map.width(), s);
  }
  return out;
}

Outcome metric_identities() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double iou_err = 0.0, affine_err = 0.0, monotone_err = 0.0;
  constexpr int kFixtures = 40;
  const char* ranking[] = {"image_auroc", "image_ap", "image_f1max", "aupro", "pixel_auroc",
                           "pixel_ap",    "pixel_f1max", "ioumax"};
  for (int t = 0; t < kFixtures; ++t) {
    const CategoryEvalSet set = random_fixture(rng);
    const MetricRecord r = evaluate_category(set);
    const double f = r.pixel_f1max / 100.0;
    iou_err = std::max(iou_err, std::abs(r.ioumax / 100.0 - f / (2.0 - f)));

    const double a = 0.01 + 50.0 * unit(rng);
    const double b = -20.0 + 40.0 * unit(rng);
    const MetricRecord ra = evaluate_category(transform(set, [&](double v) { return a * v + b; }));
    for (const auto& fld : kMetricFields) affine_err = std::max(affine_err, std::abs(r.*fld.member - ra.*fld.member));

    const MetricRecord rm = evaluate_category(transform(set, [](double v) { return std::exp(3.0 * v) + v * v * v; }));
    const nlohmann::json j0 = r, jm = rm;
    for (const char* key : ranking)
      monotone_err = std::max(monotone_err, std::abs(j0[key].get<double>() - jm[key].get<double>()));
  }
  const bool ok = iou_err <= 1e-9 && affine_err <= 1e-9 && monotone_err <= 1e-9;
  return pass_if(ok, std::to_string(kFixtures) + " fixtures: IoU-max identity " + fmt(iou_err) + ", affine " +
                         fmt(affine_err) + ", monotone (ranking) " + fmt(monotone_err));
}

// ---------------------------------------------------------------------------
// 5. Histogram path accuracy

Outcome quantized_accuracy() {
  constexpr std::size_t kScores = 1'000'000;
  constexpr std::size_t kBins = 100'000;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> s(kScores);
  std::vector<std::uint8_t> y(kScores);
  for (std::size_t i = 0; i < kScores; ++i) {
    y[i] = unit(rng) < 0.1;
    const double u = unit(rng);
    s[i] = y[i] ? std::sqrt(u) : u * u;
  }
  const RankingSummary exact = summarize_ranking(s, y);
  const RankingSummary hist = summarize_histogram(quantize_scores(s, y, kBins));
  const double d_auroc = std::abs(exact.auroc - hist.auroc);
  const double d_ap = std::abs(exact.average_precision - hist.average_precision);
  return pass_if(d_auroc <= 5e-4 && d_ap <= 5e-4,
                 "1e6 scores, 1e5 bins: |d auroc| " + fmt(d_auroc) + ", |d ap| " + fmt(d_ap));
}

// ---------------------------------------------------------------------------
// 6. Band metrics vs exact pixel triple on 5e7 pixels

Outcome timing_property() {
  const CategoryEvalSet set = cli::timing_fixture(50'000'000, 6);
  EvalOptions options;
  const cli::TimingResult t = cli::time_metrics(set, options, false);
  return pass_if(t.pixels >= 50'000'000 && t.band_speedup() >= 5.0,
                 std::to_string(t.pixels) + " px: sort triple " + fmt(t.pixel_triple_s) + " s, band " +
                     fmt(t.band_s) + " s, ratio " + fmt(t.band_speedup()) + "x (histogram triple " +
                     fmt(t.pixel_histogram_s) + " s)");
}

// ---------------------------------------------------------------------------
// 7. COCO-AD builder: mini fixture, plus real data when present

std::optional<fs::path> real_coco_root() {
  const char* env = std::getenv("ADBENCH_COCO_ROOT");
  if (env == nullptr) return std::nullopt;
  const fs::path root(env);
  for (const fs::path& p : {root / "annotations" / "instances_val2017.json", root / "instances_val2017.json"}) {
    if (fs::is_regular_file(p)) return root;
  }
  return std::nullopt;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

BinaryMask box_mask(std::initializer_list<std::array<std::size_t, 4>> boxes) {
  BinaryMask m(8, 8);
  for (const auto& [r0, r1, c0, c1] : boxes)
    for (std::size_t r = r0; r < r1; ++r)
      for (std::size_t c = c0; c < c1; ++c) m.set(r, c, true);
  return m;
}

Outcome coco_builder() {
  using namespace coco;
  const fixtures::MiniCoco mini;
  const fs::path out = oracle::temp_dir("acceptance_mini_coco");
  const BuildResult res = build_split(fixtures::parse_text(mini.train.dump(), {.keep_segmentation = false}),
                                      fixtures::parse_text(mini.val.dump()), mini.assignment(), out);
  const fs::path root = out / "split0";
  bool ok = read_lines(root / "train" / "good" / "images.txt") ==
                std::vector<std::string>{"train2017/11.jpg", "train2017/14.jpg", "train2017/16.jpg"} &&
            read_lines(root / "test" / "good" / "images.txt") ==
                std::vector<std::string>{"val2017/1.jpg", "val2017/6.jpg"} &&
            read_lines(root / "test" / "anomaly" / "images.txt") ==
                std::vector<std::string>{"val2017/2.jpg", "val2017/3.jpg", "val2017/5.jpg"};
  // Hand-derived masks: pixel centres inside each anomaly-class region.
  ok = ok && read_mask(root / "test" / "anomaly" / "2.pgm") == box_mask({{1, 3, 1, 4}});
  ok = ok && read_mask(root / "test" / "anomaly" / "3.pgm") == box_mask({{0, 8, 6, 7}});
  ok = ok && read_mask(root / "test" / "anomaly" / "5.pgm") == box_mask({{0, 2, 0, 2}, {5, 8, 5, 8}});
  std::string detail = "mini fixture: train " + std::to_string(res.report.train) + ", test normal " +
                       std::to_string(res.report.test_normal) + ", test anomalous " +
                       std::to_string(res.report.test_anomaly) + (ok ? ", masks match" : ", MISMATCH");

  const auto real = real_coco_root();
  if (!real) return pass_if(ok, detail + "; real COCO 2017 not present (set ADBENCH_COCO_ROOT), conditional part skipped");
  cli::RunConfig c;
  c.command = "build-cocoad";
  c.input = *real;
  c.output = oracle::temp_dir("acceptance_real_coco");
  std::ostringstream log;
  const json report = cli::build_cocoad(c, log);
  const bool counts_ok = report["deviations"].empty();
  if (!counts_ok) detail += "; real-data deviations: " + report["deviations"].dump();
  else detail += "; real data: all four splits match the published counts";
  return pass_if(ok && counts_ok, detail);
}

// ---------------------------------------------------------------------------
// 8. RLE round trips and polygon rasterization

bool ray_cast_inside(const coco::Polygon& poly, double px, double py) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y > py) != (b.y > py) && px < a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y)) in = !in;
  }
  return in;
}

Outcome rle_polygon() {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int rle_bad = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t h = 1 + rng() % 64, w = 1 + rng() % 64;
    BinaryMask m(h, w);
    const int style = t % 4;
    const double density = unit(rng);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c) {
        bool v = false;
        if (style == 0) v = unit(rng) < density;                            // salt and pepper
        if (style == 1) v = (r / 3 + c / 5) % 2 == 0;                      // blocks
        if (style == 2) v = std::hypot(double(r) - h / 2.0, double(c) - w / 2.0) < density * 20;  // disc
        if (style == 3) v = t % 8 == 3;                                    // all set or all clear
        m.set(r, c, v);
      }
    const coco::RunLengths rle = coco::encode_rle(m);
    const bool ok = coco::decode_rle(rle) == m && coco::decompress_counts(coco::compress_counts(rle.counts)) == rle.counts;
    rle_bad += ok ? 0 : 1;
  }
  int poly_bad = 0;
  constexpr double kPi = 3.14159265358979323846;
  for (int t = 0; t < 100; ++t) {
    const std::size_t h = 8 + rng() % 40, w = 8 + rng() % 40;
    const double cx = w * (0.3 + 0.4 * unit(rng)), cy = h * (0.3 + 0.4 * unit(rng));
    const double rmax = 0.5 * std::min({cx, cy, w - cx, h - cy}) + 1.0;
    const std::size_t n = 3 + rng() % 12;
    const bool concave = t % 2 == 1;
    std::vector<double> angles(n);
    for (auto& a : angles) a = 2.0 * kPi * unit(rng);
    std::sort(angles.begin(), angles.end());
    coco::Polygon poly;
    for (std::size_t k = 0; k < n; ++k) {
      // Convex: all vertices on one circle. Concave: radii vary (star-shaped).
      const double radius = concave ? rmax * (0.25 + 0.75 * unit(rng)) : rmax;
      poly.push_back({cx + radius * std::cos(angles[k]), cy + radius * std::sin(angles[k])});
    }
    const BinaryMask m = coco::rasterize_polygon(poly, h, w);
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t c = 0; c < w; ++c)
        if (m(r, c) != ray_cast_inside(poly, c + 0.5, r + 0.5)) {
          ++poly_bad;
          r = h;
          break;
        }
  }
  return pass_if(rle_bad == 0 && poly_bad == 0, "200 masks: " + std::to_string(rle_bad) +
                                                    " round-trip failures; 100 polygons (50 convex, 50 concave): " +
                                                    std::to_string(poly_bad) + " mismatches vs point-in-polygon");
}

// ---------------------------------------------------------------------------
// 9. Gradient check of the feature-inversion model

Outcome gradient_check() {
  const invad::InvadState st = invad::init_state(invad::PipelineConfig{}, 9);
  const invad::ToyData data = invad::make_toy_data(9, {32, 1, 1, 0});
  invad::GradCheckOptions opt;
  opt.probes_per_group = 64;
  const invad::GradCheckReport r = invad::grad_check(st, data.train, opt);
  std::string detail = std::to_string(r.probes) + " probes (" + std::to_string(opt.probes_per_group) + " per group):";
  bool ok = r.group_error.size() == 5 && r.probes >= 5 * 64;
  for (const auto& [group, err] : r.group_error) {
    detail += " " + group + " " + fmt(err, 2);
    ok = ok && err <= 1e-4;
  }
  return pass_if(ok && r.max_relative_error <= 1e-4, detail);
}

// ---------------------------------------------------------------------------
// 10. Demo end to end, reproducible across runs and worker counts

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), root).generic_string()] = s.str();
  }
  return files;
}

Outcome invad_end_to_end() {
  const fs::path dir = oracle::temp_dir("acceptance_invad");
  cli::RunConfig c;
  c.command = "invad-demo";
  c.seed = 0;
  std::ostringstream sink;
  std::vector<std::map<std::string, std::string>> outputs;
  double cpu_max = 0.0;
  for (const auto& [name, workers] : std::vector<std::pair<std::string, std::size_t>>{{"a", 1}, {"b", 1}, {"c", 4}}) {
    c.output = dir / name;
    c.workers = workers;
    const std::clock_t start = std::clock();
    if (cli::run_invad_demo(c, sink, sink) != 0) return {Status::kFail, "invad-demo failed: " + sink.str()};
    cpu_max = std::max(cpu_max, static_cast<double>(std::clock() - start) / CLOCKS_PER_SEC);
    outputs.push_back(tree(c.output));
  }
  const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2];
  const json record = json::parse(outputs[0].at("record.json"));
  const double auroc = record["metrics"]["pixel_auroc"].get<double>();
  return pass_if(same && auroc >= 80.0 && cpu_max <= 300.0,
                 "seed 0 pixel AU-ROC " + format_fixed(auroc) + ", outputs " +
                     (same ? "byte-identical" : "DIFFER") + " across 2 runs x workers {1,4}, " + fmt(cpu_max) +
                     " s CPU per run");
}

// ---------------------------------------------------------------------------
// 11. Area statistics of the real split 0

Outcome dataset_statistics() {
  const auto real = real_coco_root();
  if (!real) return {Status::kSkip, "real COCO 2017 not present (set ADBENCH_COCO_ROOT)"};
  cli::RunConfig c;
  c.command = "build-cocoad";
  c.input = *real;
  c.split = "0";
  c.output = oracle::temp_dir("acceptance_real_stats");
  std::ostringstream log;
  cli::build_cocoad(c, log);
  const auto manifest = load_manifest(c.output / "split0" / "manifest.json", {.require_predictions = false});
  const coco::StatsReport s = coco::dataset_statistics(manifest);
  const double within = 100.0 * s.image_area_fraction_within(0.10);
  return pass_if(within >= 85.0, fmt(within, 4) + "% of anomalous images have <= 10% anomalous area (" +
                                     std::to_string(s.images) + " images)");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"aggregation identity", aggregation_identity},
      {"split-mean identity", split_mean_identity},
      {"oracle equivalence", oracle_equivalence},
      {"metric identities", metric_identities},
      {"quantized-path accuracy", quantized_accuracy},
      {"timing property", timing_property},
      {"COCO-AD builder", coco_builder},
      {"RLE/polygon correctness", rle_polygon},
      {"gradient check", gradient_check},
      {"feature-inversion end to end", invad_end_to_end},
      {"dataset statistics", dataset_statistics},
  };
  std::set<int> only, known_red;
  auto parse_list = [](const std::string& text, std::set<int>& into) {
    std::stringstream s(text);
    for (std::string item; std::getline(s, item, ',');)
      if (!item.empty()) into.insert(std::stoi(item));
  };
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--only") parse_list(argv[i + 1], only);
    else if (flag == "--known-red") parse_list(argv[i + 1], known_red);
    else {
      std::cerr << "usage: acceptance [--only N,...] [--known-red N,...]\n";
      return 2;
    }
  }

  std::set<int> red;
  int passed = 0, skipped = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.contains(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    std::cout << "criterion " << std::setw(2) << id << "  " << tag << "  " << criteria[k].first << ": " << o.detail
              << "  [" << std::fixed << std::setprecision(1) << secs << " s]" << std::defaultfloat << std::endl;
    if (o.status == Status::kFail) red.insert(id);
    passed += o.status == Status::kPass;
    skipped += o.status == Status::kSkip;
  }
  std::set<int> expected_red;
  for (int id : known_red)
    if (only.empty() || only.contains(id)) expected_red.insert(id);
  std::cout << passed << " passed, " << red.size() << " failed, " << skipped << " skipped";
  if (!known_red.empty()) {
    std::cout << " (known red:";
    for (int id : known_red) std::cout << ' ' << id;
    std::cout << ")";
  }
  std::cout << std::endl;
  if (red != expected_red) {
    std::cout << "failing set differs from the known-red set" << std::endl;
    return 1;
  }
  return 0;
}
