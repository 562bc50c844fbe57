// Copyright 2026 The WhatIf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "whatif/ingest.h"

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"
#include "whatif/value.h"

namespace whatif {
namespace {

using ::testing::HasSubstr;

TEST(ValueTest, FormatNumberIsShortestRoundTrip) {
  EXPECT_EQ(FormatNumber(10), "10");
  EXPECT_EQ(FormatNumber(0.1), "0.1");
  EXPECT_EQ(FormatNumber(-2.5), "-2.5");
}

TEST(ValueTest, ParseFiniteNumber) {
  EXPECT_EQ(ParseFiniteNumber(" 3.5 "), 3.5);
  EXPECT_EQ(ParseFiniteNumber("+2"), 2.0);
  EXPECT_EQ(ParseFiniteNumber("1e3"), 1000.0);
  EXPECT_FALSE(ParseFiniteNumber("inf"));
  EXPECT_FALSE(ParseFiniteNumber("nan"));
  EXPECT_FALSE(ParseFiniteNumber("12abc"));
  EXPECT_FALSE(ParseFiniteNumber(""));
}

TEST(ValueTest, CanonicalEncodingSeparatesTypes) {
  std::vector<Value> a = {Value{1.0}};
  std::vector<Value> b = {Value{std::string("1")}};
  std::vector<Value> c = {Value{}};
  std::string ea, eb, ec;
  AppendCanonicalEncoding(a, ea);
  AppendCanonicalEncoding(b, eb);
  AppendCanonicalEncoding(c, ec);
  EXPECT_NE(ea, eb);
  EXPECT_NE(ea, ec);
  EXPECT_NE(eb, ec);
  std::vector<Value> z1 = {Value{0.0}};
  std::vector<Value> z2 = {Value{-0.0}};
  std::string e1, e2;
  AppendCanonicalEncoding(z1, e1);
  AppendCanonicalEncoding(z2, e2);
  EXPECT_EQ(e1, e2);
}

TEST(IngestTest, InfersNumericAndCategorical) {
  ASSERT_OK_AND_ASSIGN(Dataset ds, Ingest("a,b\n1,x\n2,y", DataFormat::kCsv));
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.features()[0].kind, FeatureKind::kNumeric);
  EXPECT_EQ(ds.features()[1].kind, FeatureKind::kCategorical);
  EXPECT_EQ(ds.point(0).id, 0u);
  EXPECT_EQ(ds.point(1).id, 1u);
  EXPECT_EQ(std::get<double>(ds.point(1).values[0]), 2.0);
  EXPECT_EQ(std::get<std::string>(ds.point(1).values[1]), "y");
}

TEST(IngestTest, BlankLineInSingleColumnIsMissing) {
  ASSERT_OK_AND_ASSIGN(Dataset ds, Ingest("a\n1\n\n3", DataFormat::kCsv));
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_TRUE(IsMissing(ds.point(1).values[0]));
  EXPECT_EQ(ds.statistics()[0].schema.missing_count, 1u);
}

TEST(IngestTest, QuotedFieldsFollowRfc4180) {
  ASSERT_OK_AND_ASSIGN(
      Dataset ds,
      Ingest("name,note\n\"Smith, J\",\"said \"\"hi\"\"\"\nx,\"multi\nline\"\n",
             DataFormat::kCsv));
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(std::get<std::string>(ds.point(0).values[0]), "Smith, J");
  EXPECT_EQ(std::get<std::string>(ds.point(0).values[1]), "said \"hi\"");
  EXPECT_EQ(std::get<std::string>(ds.point(1).values[1]), "multi\nline");
}

TEST(IngestTest, CrLfLineEndings) {
  ASSERT_OK_AND_ASSIGN(Dataset ds, Ingest("a,b\r\n1,2\r\n3,4\r\n", DataFormat::kCsv));
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.features()[1].kind, FeatureKind::kNumeric);
}

TEST(IngestTest, MixedColumnBecomesCategorical) {
  ASSERT_OK_AND_ASSIGN(Dataset ds, Ingest("a\n1\nx\n2.5", DataFormat::kCsv));
  EXPECT_EQ(ds.features()[0].kind, FeatureKind::kCategorical);
  EXPECT_EQ(std::get<std::string>(ds.point(0).values[0]), "1");
}

TEST(IngestTest, EmptyFileIsAnError) {
  EXPECT_FALSE(Ingest("", DataFormat::kCsv).ok());
  EXPECT_FALSE(Ingest("", DataFormat::kJsonl).ok());
}

TEST(IngestTest, ArityMismatchNamesRowAndColumn) {
  absl::StatusOr<Dataset> ds = Ingest("a,b\n1,2\n3\n", DataFormat::kCsv);
  ASSERT_FALSE(ds.ok());
  EXPECT_THAT(std::string(ds.status().message()), HasSubstr("row 1"));
  EXPECT_THAT(std::string(ds.status().message()), HasSubstr("column"));
}

TEST(IngestTest, UnterminatedQuoteIsAnError) {
  EXPECT_FALSE(Ingest("a\n\"abc\n", DataFormat::kCsv).ok());
}

TEST(IngestTest, DuplicateHeaderIsAnError) {
  EXPECT_FALSE(Ingest("a,a\n1,2\n", DataFormat::kCsv).ok());
}

TEST(IngestTest, JsonlAbsentKeyAndNullAreMissing) {
  ASSERT_OK_AND_ASSIGN(
      Dataset ds, Ingest("{\"a\": 1, \"b\": \"x\"}\n{\"a\": null}\n{\"b\": \"y\", \"a\": 3}\n",
                         DataFormat::kJsonl));
  ASSERT_EQ(ds.size(), 3u);
  ASSERT_EQ(ds.num_features(), 2u);
  EXPECT_EQ(ds.features()[0].name, "a");
  EXPECT_TRUE(IsMissing(ds.point(1).values[0]));
  EXPECT_TRUE(IsMissing(ds.point(1).values[1]));
  EXPECT_EQ(std::get<double>(ds.point(2).values[0]), 3.0);
}

TEST(IngestTest, JsonlMalformedLineNamesRow) {
  absl::StatusOr<Dataset> ds =
      Ingest("{\"a\": 1}\n{\"a\": \n", DataFormat::kJsonl);
  ASSERT_FALSE(ds.ok());
  EXPECT_THAT(std::string(ds.status().message()), HasSubstr("row 1"));
  EXPECT_FALSE(Ingest("[1,2]\n", DataFormat::kJsonl).ok());
  EXPECT_FALSE(Ingest("{\"a\": {\"b\": 1}}\n", DataFormat::kJsonl).ok());
}

TEST(IngestTest, DeclaredSchemaOrderWins) {
  std::vector<Feature> schema = {testing::Cat("b"), testing::Cat("a")};
  ASSERT_OK_AND_ASSIGN(Dataset ds, Ingest("a,b\n1,2\n", DataFormat::kCsv, schema));
  EXPECT_EQ(ds.features()[0].name, "b");
  EXPECT_EQ(ds.features()[1].kind, FeatureKind::kCategorical);
  EXPECT_EQ(std::get<std::string>(ds.point(0).values[1]), "1");
  std::vector<Feature> wrong = {testing::Num("a")};
  EXPECT_FALSE(Ingest("a,b\n1,2\n", DataFormat::kCsv, wrong).ok());
  std::vector<Feature> bad_kind = {testing::Num("a"), testing::Num("b")};
  EXPECT_FALSE(Ingest("a,b\n1,x\n", DataFormat::kCsv, bad_kind).ok());
}

TEST(IngestTest, InferenceIsDeterministic) {
  const std::string csv = "x,y,z\n1,a,\n2,b,3\n,c,4\n";
  ASSERT_OK_AND_ASSIGN(Dataset a, Ingest(csv, DataFormat::kCsv));
  ASSERT_OK_AND_ASSIGN(Dataset b, Ingest(csv, DataFormat::kCsv));
  ASSERT_EQ(a.features(), b.features());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.point(i).id, b.point(i).id);
    EXPECT_EQ(a.point(i).values, b.point(i).values);
  }
}

TEST(IngestTest, FormatFromPath) {
  EXPECT_EQ(FormatFromPath("x.jsonl"), DataFormat::kJsonl);
  EXPECT_EQ(FormatFromPath("x.ndjson"), DataFormat::kJsonl);
  EXPECT_EQ(FormatFromPath("x.csv"), DataFormat::kCsv);
}

TEST(IngestTest, FixtureLoads) {
  ASSERT_OK_AND_ASSIGN(Dataset ds,
                       IngestFile(testing::FixturePath("census_small.csv")));
  EXPECT_EQ(ds.size(), 40u);
  EXPECT_EQ(ds.num_features(), 7u);
  EXPECT_FALSE(IngestFile("/nonexistent/file.csv").ok());
}

}  // namespace
}  // namespace whatif
