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

// Hand-checked six-image COCO fixture shared by the builder tests.

#pragma once

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "adbench/cocoad/coco.hpp"
#include "adbench/cocoad/splits.hpp"

namespace adbench::coco::fixtures {

using nlohmann::json;

inline CocoDataset parse_text(const std::string& text, CocoParseOptions options = {}) {
  std::istringstream in(text);
  return parse_coco(in, options);
}

inline json box(double x0, double y0, double x1, double y1) { return json::array({json::array({x0, y0, x1, y0, x1, y1, x0, y1})}); }

// Mini fixture: categories 1, 2 (anomalous), 3, 5 (normal); 8x8 images.
struct MiniCoco {
  json train;
  json val;

  MiniCoco() {
    const json cats = {{{"id", 1}, {"name", "one"}}, {{"id", 2}, {"name", "two"}},
                       {{"id", 3}, {"name", "three"}}, {{"id", 5}, {"name", "five"}}};
    auto images = [](int first) {
      json arr = json::array();
      for (int k = 0; k < 6; ++k) {
        arr.push_back({{"id", first + k}, {"height", 8}, {"width", 8}, {"file_name", std::to_string(first + k) + ".jpg"}});
      }
      return arr;
    };
    int next_id = 100;
    auto ann = [&](int image, int cat, json seg, int crowd = 0) {
      return json{{"id", next_id++}, {"image_id", image}, {"category_id", cat}, {"iscrowd", crowd}, {"segmentation", seg}};
    };
    // column 6 fully set: zero-run 48, one-run 8, zero-run 8
    const json crowd_rle = {{"counts", {48, 8, 8}}, {"size", {8, 8}}};
    val = {{"images", images(1)},
           {"categories", cats},
           {"annotations",
            {ann(1, 3, box(0, 0, 3, 3)),                           // 1: normal
             ann(2, 1, box(1, 1, 4, 3)),                           // 2: anomalous, 3x2 block
             ann(3, 2, crowd_rle, 1), ann(3, 5, box(0, 0, 2, 2)),  // 3: anomalous via crowd only
             /* 4: unannotated */
             ann(5, 1, box(0, 0, 2, 2)), ann(5, 2, box(5, 5, 8, 8)), ann(5, 3, box(2, 0, 8, 2)),  // 5: two regions
             ann(6, 5, box(0, 0, 8, 8))}}};                        // 6: normal
    train = {{"images", images(11)},
             {"categories", cats},
             {"annotations",
              {ann(11, 3, box(0, 0, 3, 3)),               // 11: train
               ann(12, 1, box(0, 0, 3, 3)),               // 12: excluded
               /* 13: unannotated */
               ann(14, 5, box(0, 0, 3, 3)), ann(14, 3, box(4, 4, 6, 6)),  // 14: train
               ann(15, 2, crowd_rle, 1),                  // 15: excluded (crowd anomaly)
               ann(16, 5, box(1, 1, 2, 2))}}};            // 16: train
  }

  SplitAssignment assignment() const { return {0, {1, 2}, {3, 5}}; }
};

// COCO's 80 category ids.
inline std::vector<CocoCategory> coco_categories() {
  const int ids[] = {1,  2,  3,  4,  5,  6,  7,  8,  9,  10, 11, 13, 14, 15, 16, 17, 18, 19, 20, 21,
                     22, 23, 24, 25, 27, 28, 31, 32, 33, 34, 35, 36, 37, 38, 39, 40, 41, 42, 43, 44,
                     46, 47, 48, 49, 50, 51, 52, 53, 54, 55, 56, 57, 58, 59, 60, 61, 62, 63, 64, 65,
                     67, 70, 72, 73, 74, 75, 76, 77, 78, 79, 80, 81, 82, 84, 85, 86, 87, 88, 89, 90};
  std::vector<CocoCategory> cats;
  for (int id : ids) cats.push_back({id, "c" + std::to_string(id), 0});
  return cats;
}

}  // namespace adbench::coco::fixtures
