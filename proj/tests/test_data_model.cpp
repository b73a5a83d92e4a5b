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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "adbench/data/image_score.hpp"
#include "adbench/data/manifest.hpp"
#include "adbench/data/mask_io.hpp"
#include "adbench/data/tensor_blob.hpp"
#include "oracles.hpp"

namespace adbench {
namespace {

namespace fs = std::filesystem;

TEST(TensorBlob, F32RoundTripAndLayout) {
  const auto dir = oracle::temp_dir("blob_f32");
  const auto blob = TensorBlob::from_values<float>({2, 2}, std::vector<float>{1, 2, 3, 4});
  write_tensor_blob(blob, dir / "a.adtb");
  // 8-byte fixed header, 2 dims x 8 bytes, 4 floats.
  EXPECT_EQ(fs::file_size(dir / "a.adtb"), 8u + 16u + 16u);
  const auto back = read_tensor_blob(dir / "a.adtb");
  EXPECT_EQ(back, blob);
  EXPECT_EQ(back.values<float>(), (std::vector<float>{1, 2, 3, 4}));

  const auto bytes = encode_tensor_blob(blob);
  EXPECT_EQ(std::memcmp(bytes.data(), "ADTB", 4), 0);
  EXPECT_EQ(static_cast<int>(bytes[4]), 1);  // version, little-endian
  EXPECT_EQ(static_cast<int>(bytes[5]), 0);
  EXPECT_EQ(static_cast<int>(bytes[6]), 1);  // f32
  EXPECT_EQ(static_cast<int>(bytes[7]), 2);  // ndim
  EXPECT_EQ(static_cast<int>(bytes[8]), 2);  // dims[0] low byte
  // 1.0f = 0x3f800000 stored little-endian
  EXPECT_EQ(static_cast<int>(bytes[24]), 0x00);
  EXPECT_EQ(static_cast<int>(bytes[27]), 0x3f);
}

TEST(TensorBlob, SmallestLegalFile) {
  const auto dir = oracle::temp_dir("blob_u8");
  const auto blob = TensorBlob::from_values<std::uint8_t>({1}, std::vector<std::uint8_t>{0});
  write_tensor_blob(blob, dir / "b.adtb");
  EXPECT_EQ(fs::file_size(dir / "b.adtb"), 8u + 8u + 1u);
  EXPECT_EQ(read_tensor_blob(dir / "b.adtb"), blob);
}

TEST(TensorBlob, RandomRoundTripsAreBitExact) {
  const auto dir = oracle::temp_dir("blob_random");
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const DType dtype = static_cast<DType>(1 + trial % 4);
    std::vector<std::uint64_t> dims;
    if (trial == 0) {
      dims = {3, 5, 7};
    } else {
      const std::size_t nd = 1 + rng() % 4;
      for (std::size_t d = 0; d < nd; ++d) dims.push_back(1 + rng() % 6);
    }
    std::uint64_t count = 1;
    for (auto d : dims) count *= d;
    std::vector<std::byte> payload(count * element_size(dtype));
    for (auto& b : payload) b = static_cast<std::byte>(rng() & 0xFF);  // arbitrary bits, NaNs included
    const TensorBlob blob(trial == 0 ? DType::kF64 : dtype, dims,
                          trial == 0 ? std::vector<std::byte>(count * 8, std::byte{0x5a}) : payload);
    const auto path = dir / ("t" + std::to_string(trial) + ".adtb");
    write_tensor_blob(blob, path);
    EXPECT_EQ(read_tensor_blob(path), blob) << "trial " << trial;
  }
}

TEST(TensorBlob, DistinctErrorSignals) {
  const auto dir = oracle::temp_dir("blob_errors");
  auto expect_code = [&](const std::vector<std::byte>& bytes, ErrorCode code) {
    const auto path = dir / "bad.adtb";
    detail::write_all_bytes(path, bytes);
    try {
      read_tensor_blob(path);
      ADD_FAILURE() << "expected error " << to_string(code);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << e.what();
    }
  };
  auto good = encode_tensor_blob(TensorBlob::from_values<float>({2, 2}, std::vector<float>{1, 2, 3, 4}));

  auto bad_magic = good;
  std::memcpy(bad_magic.data(), "XXXX", 4);
  expect_code(bad_magic, ErrorCode::kBadMagic);

  auto bad_dtype = good;
  bad_dtype[6] = std::byte{9};
  expect_code(bad_dtype, ErrorCode::kUnknownDtype);

  auto truncated = good;
  truncated.resize(good.size() - 3);
  expect_code(truncated, ErrorCode::kTruncated);

  EXPECT_THROW(TensorBlob(DType::kF32, {2, 2}, std::vector<std::byte>(12)), Error);
  EXPECT_THROW(TensorBlob(DType::kU8, {1, 1, 1, 1, 1}, std::vector<std::byte>(1)), Error);
}

TEST(ReadMask, PgmPayloadConvention) {
  const auto dir = oracle::temp_dir("mask_pgm");
  const std::string pgm = std::string("P5\n# comment\n2 2\n255\n") + std::string("\x00\xff\xff\x00", 4);
  std::ofstream(dir / "m.pgm", std::ios::binary) << pgm;
  const BinaryMask m = read_mask(dir / "m.pgm");
  ASSERT_EQ(m.height(), 2u);
  ASSERT_EQ(m.width(), 2u);
  EXPECT_FALSE(m(0, 0));
  EXPECT_TRUE(m(0, 1));
  EXPECT_TRUE(m(1, 0));
  EXPECT_FALSE(m(1, 1));
}

TEST(ReadMask, AdtbZerosAreAllFalse) {
  const auto dir = oracle::temp_dir("mask_adtb");
  write_tensor_blob(TensorBlob::from_values<std::uint8_t>({1, 3}, std::vector<std::uint8_t>{0, 0, 0}), dir / "m.adtb");
  const BinaryMask m = read_mask(dir / "m.adtb");
  EXPECT_EQ(m.height(), 1u);
  EXPECT_EQ(m.width(), 3u);
  EXPECT_FALSE(m.any());
}

TEST(ReadMask, RejectsUnsupportedAndEmpty) {
  const auto dir = oracle::temp_dir("mask_bad");
  std::ofstream(dir / "p2.pgm", std::ios::binary) << "P2\n1 1\n255\n0\n";
  EXPECT_THROW(read_mask(dir / "p2.pgm"), Error);
  std::ofstream(dir / "max15.pgm", std::ios::binary) << std::string("P5\n1 1\n15\n\x01", 12);
  EXPECT_THROW(read_mask(dir / "max15.pgm"), Error);
  std::ofstream(dir / "zero.pgm", std::ios::binary) << "P5\n0 3\n255\n";
  try {
    read_mask(dir / "zero.pgm");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  write_tensor_blob(TensorBlob::from_values<float>({1, 1}, std::vector<float>{1}), dir / "f.adtb");
  EXPECT_THROW(read_mask(dir / "f.adtb"), Error);
}

TEST(ReadMask, PgmAndAdtbAgreeOnRandomRasters) {
  const auto dir = oracle::temp_dir("mask_cross");
  std::mt19937 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t h = 1 + rng() % 9;
    const std::size_t w = 1 + rng() % 9;
    std::vector<std::uint8_t> raster(h * w);
    for (auto& v : raster) v = static_cast<std::uint8_t>(rng() % 3 == 0 ? rng() % 256 : 0);
    // PGM carrying the raw raster bytes (maxval 255)
    const std::string header = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    std::vector<std::byte> pgm(header.size() + raster.size());
    std::memcpy(pgm.data(), header.data(), header.size());
    std::memcpy(pgm.data() + header.size(), raster.data(), raster.size());
    const auto adtb = encode_tensor_blob(TensorBlob::from_values<std::uint8_t>({h, w}, raster));
    const BinaryMask a = decode_mask(pgm);
    const BinaryMask b = decode_mask(adtb);
    ASSERT_EQ(a, b) << "trial " << trial;
    for (std::size_t i = 0; i < raster.size(); ++i) ASSERT_EQ(a[i], raster[i] != 0);
  }
}

TEST(ImageScore, MaxAndTopK) {
  const ScoreMap map(1, 3, std::vector<double>{0.1, 0.9, 0.4});
  EXPECT_DOUBLE_EQ(derive_image_score(map), 0.9);
  EXPECT_DOUBLE_EQ(derive_image_score(map, TopKMean{2}), 0.65);
  const ScoreMap constant(2, 2, 0.37);
  EXPECT_DOUBLE_EQ(derive_image_score(constant), 0.37);
  EXPECT_DOUBLE_EQ(derive_image_score(constant, TopKMean{3}), 0.37);
  EXPECT_THROW(derive_image_score(map, TopKMean{4}), Error);
  EXPECT_THROW(derive_image_score(map, TopKMean{0}), Error);
  EXPECT_THROW(derive_image_score(ScoreMap{}), Error);
}

TEST(ImageScore, MaxIsPermutationInvariant) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(1 + rng() % 40);
    for (auto& v : s) v = u(rng);
    const double a = derive_image_score(ScoreMap(1, s.size(), s));
    std::shuffle(s.begin(), s.end(), rng);
    EXPECT_EQ(a, derive_image_score(ScoreMap(1, s.size(), s)));
  }
}

TEST(ImageScore, ParseMode) {
  EXPECT_TRUE(std::holds_alternative<MaxScore>(parse_image_score_mode("max")));
  EXPECT_EQ(std::get<TopKMean>(parse_image_score_mode("topk:5")).k, 5u);
  EXPECT_THROW(parse_image_score_mode("topk:"), Error);
  EXPECT_THROW(parse_image_score_mode("mean"), Error);
}

TEST(ScoreMapType, RejectsNonFiniteAndBadShape) {
  EXPECT_THROW(ScoreMap(1, 2, std::vector<double>{0.0, std::nan("")}), Error);
  EXPECT_THROW(ScoreMap(2, 2, std::vector<double>{0.0}), Error);
  EXPECT_THROW(ScoreMap(0, 2, std::vector<double>{}), Error);
}

class ManifestTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = oracle::temp_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    write_score_map(ScoreMap(2, 2, 0.1), dir_ / "n.adtb");
    write_score_map(ScoreMap(2, 2, 0.9), dir_ / "a.adtb");
    BinaryMask m(2, 2);
    m.set(0, 0, true);
    write_pgm_mask(m, dir_ / "a.pgm");
    write_pgm_mask(BinaryMask(2, 2), dir_ / "n.pgm");
  }

  nlohmann::json minimal() const {
    return {{"name", "toy"},
            {"categories",
             {{{"name", "c0"},
               {"records",
                {{{"id", "n0"}, {"label", "normal"}, {"score_map", "n.adtb"}},
                 {{"id", "a0"}, {"label", "anomalous"}, {"score_map", "a.adtb"}, {"mask", "a.pgm"}}}}}}}};
  }

  DatasetManifest load(const nlohmann::json& doc) {
    std::ofstream(dir_ / "manifest.json") << doc.dump(2);
    return load_manifest(dir_ / "manifest.json");
  }

  ErrorCode load_error(const nlohmann::json& doc) {
    try {
      load(doc);
    } catch (const Error& e) {
      return e.code();
    }
    ADD_FAILURE() << "manifest unexpectedly loaded";
    return ErrorCode::kIo;
  }

  fs::path dir_;
};

TEST_F(ManifestTest, MinimalLoads) {
  const DatasetManifest m = load(minimal());
  EXPECT_EQ(m.name, "toy");
  ASSERT_EQ(m.categories.size(), 1u);
  ASSERT_EQ(m.categories[0].records.size(), 2u);
  EXPECT_EQ(m.categories[0].records[1].label, ImageLabel::kAnomalous);
  EXPECT_EQ(m.categories[0].records[1].mask_path, dir_ / "a.pgm");

  const CategoryEvalSet set = load_category(m.categories[0]);
  ASSERT_EQ(set.images.size(), 2u);
  EXPECT_FALSE(set.images[0].mask.any());
  EXPECT_TRUE(set.images[1].mask(0, 0));
  EXPECT_NEAR(set.images[1].map(1, 1), 0.9, 1e-7);
}

TEST_F(ManifestTest, LoadingTwiceIsDeterministic) {
  auto doc = minimal();
  doc["categories"][0]["records"][0]["image_score"] = 0.25;
  EXPECT_EQ(load(doc), load(doc));
}

TEST_F(ManifestTest, DuplicateCategory) {
  auto doc = minimal();
  doc["categories"].push_back(doc["categories"][0]);
  EXPECT_EQ(load_error(doc), ErrorCode::kDuplicateCategory);
}

TEST_F(ManifestTest, AnomalousWithoutMask) {
  auto doc = minimal();
  doc["categories"][0]["records"][1].erase("mask");
  EXPECT_EQ(load_error(doc), ErrorCode::kMissingMask);
}

TEST_F(ManifestTest, DanglingPredictionNamesRecord) {
  auto doc = minimal();
  doc["categories"][0]["records"][1]["score_map"] = "missing.adtb";
  try {
    load(doc);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDanglingPath);
    EXPECT_NE(std::string(e.what()).find("a0"), std::string::npos);
    EXPECT_TRUE(e.is_validation());
  }
}

TEST_F(ManifestTest, CategoryWithoutAnomalies) {
  auto doc = minimal();
  doc["categories"][0]["records"].erase(1);
  EXPECT_EQ(load_error(doc), ErrorCode::kNoAnomalousRecord);
}

TEST_F(ManifestTest, MaskContentMustMatchLabel) {
  auto doc = minimal();
  doc["categories"][0]["records"][1]["mask"] = "n.pgm";
  EXPECT_EQ(load_error(doc), ErrorCode::kValidation);
  doc = minimal();
  doc["categories"][0]["records"][0]["mask"] = "a.pgm";
  EXPECT_EQ(load_error(doc), ErrorCode::kValidation);
  doc = minimal();
  doc["categories"][0]["records"][0]["mask"] = "n.pgm";
  EXPECT_NO_THROW(load(doc));
}

TEST_F(ManifestTest, SchemaViolations) {
  auto doc = minimal();
  doc["categories"][0]["records"][0]["label"] = "weird";
  EXPECT_EQ(load_error(doc), ErrorCode::kValidation);
  doc = minimal();
  doc.erase("name");
  EXPECT_EQ(load_error(doc), ErrorCode::kValidation);
  doc = minimal();
  doc["categories"] = nlohmann::json::array();
  EXPECT_EQ(load_error(doc), ErrorCode::kValidation);
  std::ofstream(dir_ / "broken.json") << "{ not json";
  EXPECT_THROW(load_manifest(dir_ / "broken.json"), Error);
}

}  // namespace
}  // namespace adbench
