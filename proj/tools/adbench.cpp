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

// adbench: anomaly-detection benchmark command line.
//
// Exit codes: 0 success, 1 other failure, 2 validation/usage error,
// 3 metric precondition failure.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "adbench/cli/commands.hpp"

namespace {

using adbench::cli::RunConfig;

void add_metric_flags(CLI::App& cmd, RunConfig& c) {
  cmd.add_option("--band", c.band, "threshold band start:end:step on normalized scores")->capture_default_str();
  cmd.add_option("--fpr-cap", c.fpr_cap, "FPR integration limit of AU-PRO")->capture_default_str();
  cmd.add_option("--norm", c.norm, "score normalization scope: category or dataset")->capture_default_str();
  cmd.add_option("--image-score", c.image_score, "image score from the map: max or topk:K")->capture_default_str();
  cmd.add_option("--pro-fpr", c.pro_fpr, "AU-PRO false-positive rate: pooled or per-image")->capture_default_str();
  cmd.add_flag("--hist", c.histogram, "quantized histogram path for pixel ranking metrics");
  cmd.add_option_function<std::size_t>(
         "--hist-bins",
         [&c](const std::size_t& bins) {
           c.hist_bins = bins;
           c.histogram = true;
         },
         "histogram bin count (implies --hist; default 100000)");
}

void add_common_flags(CLI::App& cmd, RunConfig& c) {
  cmd.add_option("--workers", c.workers, "worker threads; results do not depend on it")->capture_default_str();
  cmd.add_option("--seed", c.seed, "random seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Anomaly-detection benchmark: metrics, COCO-AD splits, feature-inversion demo"};
  app.require_subcommand(1);

  auto* eval = app.add_subcommand("eval", "evaluate the predictions referenced by a manifest");
  eval->add_option("manifest", c.input, "dataset manifest (JSON)")->required();
  eval->add_option("--out", c.output, "report directory (default: print to stdout)");
  eval->add_option("--format", c.format, "json, md or both")->capture_default_str();
  add_metric_flags(*eval, c);
  add_common_flags(*eval, c);

  auto* synth = app.add_subcommand("synth", "write a seeded synthetic fixture with planted metric values");
  synth->add_option("--out", c.output, "fixture directory")->required();
  synth->add_option("--fixture", c.fixture, "demo, perfect, constant or noisy")->capture_default_str();
  synth->add_option("--images", c.images, "images per category")->capture_default_str();
  synth->add_option("--size", c.size, "map height and width")->capture_default_str();
  synth->add_option("--fpr-cap", c.fpr_cap, "FPR cap assumed for the planted AU-PRO")->capture_default_str();
  add_common_flags(*synth, c);

  auto* timing = app.add_subcommand("timing", "time sort-based, histogram, band and AU-PRO metrics");
  timing->add_option("manifest", c.input, "manifest to time (default: in-memory synthetic category)");
  timing->add_option("--pixels", c.pixels, "pixel count of the synthetic category")->capture_default_str();
  timing->add_option("--out", c.output, "report directory (default: print to stdout)");
  add_metric_flags(*timing, c);
  add_common_flags(*timing, c);

  auto* stats = app.add_subcommand("stats", "anomaly region statistics of a manifest's masks");
  stats->add_option("manifest", c.input, "dataset manifest (JSON)")->required();
  stats->add_option("--out", c.output, "report directory (default: print to stdout)");
  add_common_flags(*stats, c);

  auto* build = app.add_subcommand("build-cocoad", "build COCO-AD splits from COCO 2017 instance annotations");
  build->add_option("coco_root", c.input, "directory holding annotations/instances_{train,val}2017.json")->required();
  build->add_option("--out", c.output, "output directory")->required();
  build->add_option("--split", c.split, "0, 1, 2, 3 or all")->capture_default_str();
  build->add_flag("--exclude-crowd", c.exclude_crowd, "drop iscrowd anomaly annotations");
  build->add_flag("--include-unannotated", c.include_unannotated, "keep images without annotations as normal");
  build->add_flag("--per-class", c.per_class, "one manifest category per anomaly class");
  add_common_flags(*build, c);

  auto* demo = app.add_subcommand("invad-demo", "train the toy feature-inversion model and score planted defects");
  demo->add_option("--out", c.output, "output directory")->required();
  demo->add_option("--epochs", c.epochs, "training epochs")->capture_default_str();
  demo->add_option("--format", c.format, "json, md or both")->capture_default_str();
  add_common_flags(*demo, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? adbench::cli::kExitOk : adbench::cli::kExitValidation;
  }
  c.command = app.get_subcommands().front()->get_name();
  return adbench::cli::run(c);
}
