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

#include <cmath>
#include <thread>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "nlohmann/json.hpp"
#include "test_util.h"
#include "whatif/builtin_model.h"
#include "whatif/ingest.h"
#include "whatif/model.h"
#include "whatif/model_registry.h"
#include "whatif/remote_model.h"

namespace whatif {
namespace {

using ::testing::HasSubstr;
using testing::Cat;
using testing::FunctionModel;
using testing::LinearSpec;
using testing::MakeDataset;
using testing::Num;

TEST(TaskKindTest, ParseRoundTrip) {
  for (const char* text : {"binary", "regression", "multiclass:4"}) {
    ASSERT_OK_AND_ASSIGN(TaskKind t, ParseTaskKind(text));
    EXPECT_EQ(TaskKindToString(t), text);
  }
  EXPECT_FALSE(ParseTaskKind("multiclass:2").ok());
  EXPECT_FALSE(ParseTaskKind("ranking").ok());
}

TEST(PredictionTest, Validation) {
  EXPECT_TRUE(ValidatePrediction({TaskKind::Binary(), {0.3}}).ok());
  EXPECT_FALSE(ValidatePrediction({TaskKind::Binary(), {1.3}}).ok());
  EXPECT_FALSE(ValidatePrediction({TaskKind::Binary(), {NAN}}).ok());
  EXPECT_TRUE(ValidatePrediction({TaskKind::Multiclass(3), {0.2, 0.3, 0.5}}).ok());
  EXPECT_FALSE(ValidatePrediction({TaskKind::Multiclass(3), {0.2, 0.3, 0.6}}).ok());
  EXPECT_FALSE(ValidatePrediction({TaskKind::Multiclass(3), {0.5, 0.5}}).ok());
  EXPECT_TRUE(ValidatePrediction({TaskKind::Regression(), {-42.0}}).ok());
}

TEST(ScoreDeltaTest, Directions) {
  ASSERT_OK_AND_ASSIGN(ScoreDelta up, ComputeScoreDelta({TaskKind::Binary(), {0.4}},
                                                        {TaskKind::Binary(), {0.7}}));
  EXPECT_EQ(up.direction, ScoreDelta::Direction::kUp);
  EXPECT_NEAR(up.delta[0], 0.3, 1e-15);
  ASSERT_OK_AND_ASSIGN(ScoreDelta flat, ComputeScoreDelta({TaskKind::Binary(), {0.4}},
                                                          {TaskKind::Binary(), {0.4}}));
  EXPECT_EQ(flat.direction, ScoreDelta::Direction::kFlat);
  // Multiclass direction follows the class that led before the change.
  ASSERT_OK_AND_ASSIGN(
      ScoreDelta mc, ComputeScoreDelta({TaskKind::Multiclass(3), {0.6, 0.3, 0.1}},
                                       {TaskKind::Multiclass(3), {0.4, 0.5, 0.1}}));
  EXPECT_EQ(mc.direction, ScoreDelta::Direction::kDown);
  EXPECT_FALSE(ComputeScoreDelta({TaskKind::Binary(), {0.4}},
                                 {TaskKind::Regression(), {0.4}})
                   .ok());
}

TEST(BuiltinModelTest, LinearSigmoidMatchesHandComputation) {
  BuiltinModelSpec spec = LinearSpec({"x", "y"}, {2.0, -1.0}, 0.5);
  spec.categorical_vocab["c"] = {"a", "b"};
  spec.feature_order.push_back("c");
  spec.layers[0].weights[0].push_back(0.25);
  spec.layers[0].weights[0].push_back(-0.75);
  ASSERT_OK_AND_ASSIGN(auto model, BuiltinModel::Create(spec));
  std::vector<Feature> features = {Cat("c"), Num("y"), Num("x")};
  std::vector<Value> r1 = {Value{std::string("b")}, Value{1.0}, Value{3.0}};
  std::vector<Value> r2 = {Value{std::string("zzz")}, Value{}, Value{0.0}};
  std::vector<Row> rows = {r1, r2};
  ASSERT_OK_AND_ASSIGN(auto out, model->PredictBatch(features, rows));
  auto sigmoid = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  EXPECT_NEAR(out[0].primary(), sigmoid(0.5 + 6.0 - 1.0 - 0.75), 1e-15);
  // Missing numerics and unseen categories encode as zero.
  EXPECT_NEAR(out[1].primary(), sigmoid(0.5), 1e-15);
}

TEST(BuiltinModelTest, SoftmaxAndRegression) {
  BuiltinModelSpec mc;
  mc.task = TaskKind::Multiclass(3);
  mc.feature_order = {"x"};
  mc.numeric_standardization["x"] = {0, 1};
  mc.layers.push_back(DenseLayer{{{1.0}, {0.0}, {-1.0}}, {0, 0, 0}, Activation::kIdentity});
  mc.output = OutputTransform::kSoftmax;
  ASSERT_OK_AND_ASSIGN(auto model, BuiltinModel::Create(mc));
  std::vector<Feature> features = {Num("x")};
  std::vector<Value> r = {Value{2.0}};
  std::vector<Row> rows = {r};
  ASSERT_OK_AND_ASSIGN(auto out, model->PredictBatch(features, rows));
  double sum = 0;
  for (double s : out[0].scores) sum += s;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(out[0].ArgmaxClass(), 0);
  EXPECT_TRUE(ValidatePrediction(out[0]).ok());

  BuiltinModelSpec reg = mc;
  reg.task = TaskKind::Regression();
  reg.layers = {DenseLayer{{{3.0}}, {1.0}, Activation::kIdentity}};
  reg.output = OutputTransform::kIdentity;
  ASSERT_OK_AND_ASSIGN(auto rmodel, BuiltinModel::Create(reg));
  ASSERT_OK_AND_ASSIGN(auto rout, rmodel->PredictBatch(features, rows));
  EXPECT_DOUBLE_EQ(rout[0].primary(), 7.0);
}

TEST(BuiltinModelTest, SpecValidationErrors) {
  BuiltinModelSpec bad = LinearSpec({"x", "y"}, {1.0}, 0.0);
  absl::Status s = BuiltinModel::Create(bad).status();
  EXPECT_EQ(s.code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(std::string(s.message()), HasSubstr("dimension mismatch"));

  BuiltinModelSpec zero_std = LinearSpec({"x"}, {1.0}, 0.0);
  zero_std.numeric_standardization["x"].std = 0.0;
  EXPECT_FALSE(BuiltinModel::Create(zero_std).ok());

  BuiltinModelSpec wrong_out = LinearSpec({"x"}, {1.0}, 0.0);
  wrong_out.output = OutputTransform::kSoftmax;
  EXPECT_FALSE(BuiltinModel::Create(wrong_out).ok());

  EXPECT_FALSE(ParseBuiltinModelSpecText("{\"task\": \"binary\"}").ok());
  EXPECT_FALSE(ParseBuiltinModelSpecText("not json").ok());
}

TEST(BuiltinModelTest, MissingInputFeatureIsAnError) {
  ASSERT_OK_AND_ASSIGN(auto model, BuiltinModel::Create(LinearSpec({"q"}, {1.0}, 0)));
  std::vector<Feature> features = {Num("x")};
  std::vector<Value> r = {Value{1.0}};
  std::vector<Row> rows = {r};
  EXPECT_EQ(model->PredictBatch(features, rows).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(BuiltinModelTest, JsonRoundTripPreservesPredictions) {
  ASSERT_OK_AND_ASSIGN(std::string text,
                       ReadFileToString(testing::FixturePath("census_mlp.json")));
  ASSERT_OK_AND_ASSIGN(BuiltinModelSpec spec, ParseBuiltinModelSpecText(text));
  ASSERT_OK_AND_ASSIGN(BuiltinModelSpec again,
                       ParseBuiltinModelSpec(BuiltinModelSpecToJson(spec)));
  ASSERT_OK_AND_ASSIGN(Dataset ds,
                       IngestFile(testing::FixturePath("census_small.csv")));
  ASSERT_OK_AND_ASSIGN(auto a, BuiltinModel::Create(spec));
  ASSERT_OK_AND_ASSIGN(auto b, BuiltinModel::Create(again));
  std::vector<Row> rows = ds.Rows();
  ASSERT_OK_AND_ASSIGN(auto pa, a->PredictBatch(ds.features(), rows));
  ASSERT_OK_AND_ASSIGN(auto pb, b->PredictBatch(ds.features(), rows));
  EXPECT_EQ(pa, pb);
}

TEST(ModelHandleTest, CacheHitsAndInvalidation) {
  auto fn = std::make_shared<FunctionModel>(
      TaskKind::Binary(), [](std::span<const Feature>, Row r) {
        return std::vector<double>{std::get<double>(r[0]) / 10.0};
      });
  ModelHandle handle(ModelSlot::kModel1, "fn", fn);
  Dataset ds = MakeDataset({Num("x")}, {{Value{1.0}}, {Value{2.0}}, {Value{1.0}}});
  ASSERT_OK_AND_ASSIGN(auto first, handle.PredictDataset(ds));
  EXPECT_EQ(fn->calls(), 1);
  EXPECT_EQ(handle.cache_size(), 2u);
  ASSERT_OK_AND_ASSIGN(auto second, handle.PredictDataset(ds));
  EXPECT_EQ(fn->calls(), 1);
  EXPECT_EQ(first, second);
  handle.Invalidate(ds.point(0).row());
  EXPECT_EQ(handle.cache_size(), 1u);
  ASSERT_OK(handle.PredictDataset(ds).status());
  EXPECT_EQ(fn->calls(), 2);
  ASSERT_OK(handle.PredictDataset(ds, CachePolicy::kBypass).status());
  EXPECT_EQ(fn->calls(), 3);
}

TEST(ModelRegistryTest, SlotsAndTaskAgreement) {
  ModelRegistry registry;
  EXPECT_TRUE(registry.empty());
  ASSERT_OK(registry.Register(ModelSlot::kModel1, LinearSpec({"x"}, {1}, 0), "a")
                .status());
  EXPECT_EQ(registry.Register(ModelSlot::kModel1, LinearSpec({"x"}, {1}, 0), "b")
                .status()
                .code(),
            absl::StatusCode::kAlreadyExists);
  auto regression = std::make_shared<FunctionModel>(
      TaskKind::Regression(),
      [](std::span<const Feature>, Row) { return std::vector<double>{0.0}; });
  EXPECT_EQ(registry.Register(ModelSlot::kModel2, regression, "r").status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(registry.comparison_mode());
  ASSERT_OK(registry.Register(ModelSlot::kModel2, LinearSpec({"x"}, {2}, 0), "")
                .status());
  EXPECT_TRUE(registry.comparison_mode());
  EXPECT_EQ(registry.Get(ModelSlot::kModel2)->display_name(), "model2");
  ASSERT_OK(registry.Unregister(ModelSlot::kModel1));
  EXPECT_EQ(registry.Require(ModelSlot::kModel1).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_EQ(SlotName(ModelSlot::kModel2), "model2");
  EXPECT_FALSE(ParseSlot("model3").ok());
}

TEST(RemoteModelTest, EndpointParsing) {
  ASSERT_OK_AND_ASSIGN(RemoteEndpoint e,
                       RemoteEndpoint::Parse("http://localhost:9000/v1/predict"));
  EXPECT_EQ(e.host, "localhost");
  EXPECT_EQ(e.port, 9000);
  EXPECT_EQ(e.path, "/v1/predict");
  ASSERT_OK_AND_ASSIGN(RemoteEndpoint d, RemoteEndpoint::Parse("http://example"));
  EXPECT_EQ(d.port, 80);
  EXPECT_EQ(d.path, "/");
  EXPECT_FALSE(RemoteEndpoint::Parse("https://x").ok());
  EXPECT_FALSE(RemoteEndpoint::Parse("http://x:notaport/").ok());
}

TEST(RemoteModelTest, EncodeAndDecode) {
  std::vector<Feature> features = {Num("x"), Cat("c")};
  std::vector<Value> r = {Value{1.5}, Value{}};
  std::vector<Row> rows = {r};
  nlohmann::json body = EncodeInstances(features, rows);
  EXPECT_EQ(body.dump(), "{\"instances\":[{\"c\":null,\"x\":1.5}]}");

  auto ok = DecodePredictions(TaskKind::Binary(),
                              nlohmann::json::parse("{\"predictions\":[[0.2,0.8]]}"), 1);
  ASSERT_TRUE(ok.ok());
  EXPECT_EQ((*ok)[0].scores, std::vector<double>{0.8});
  EXPECT_EQ(DecodePredictions(TaskKind::Binary(),
                              nlohmann::json::parse("{\"predictions\":[0.2]}"), 2)
                .status()
                .code(),
            absl::StatusCode::kDataLoss);
  EXPECT_EQ(DecodePredictions(TaskKind::Binary(), nlohmann::json::parse("{}"), 0)
                .status()
                .code(),
            absl::StatusCode::kDataLoss);
  EXPECT_FALSE(DecodePredictions(TaskKind::Binary(),
                                 nlohmann::json::parse("{\"predictions\":[\"x\"]}"), 1)
                   .ok());
}

// A fake model server scoring x / 100 for every instance.
class FakeModelServer {
 public:
  FakeModelServer() {
    server_.Post("/predict", [this](const httplib::Request& req,
                                    httplib::Response& res) {
      ++requests_;
      if (fail_) {
        res.status = 503;
        return;
      }
      nlohmann::json in = nlohmann::json::parse(req.body);
      nlohmann::json out = nlohmann::json::array();
      for (const auto& inst : in["instances"]) {
        out.push_back(inst["x"].get<double>() / 100.0);
      }
      if (garble_) {
        res.set_content("{\"predictions\": 5}", "application/json");
        return;
      }
      res.set_content(nlohmann::json{{"predictions", out}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeModelServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/predict";
  }
  int requests() const { return requests_; }
  void set_fail(bool f) { fail_ = f; }
  void set_garble(bool g) { garble_ = g; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::atomic<bool> fail_{false};
  std::atomic<bool> garble_{false};
};

TEST(RemoteModelTest, BatchesAcrossWorkersPreservingOrder) {
  FakeModelServer server;
  RemoteOptions options;
  options.batch_size = 7;
  options.max_in_flight = 4;
  ASSERT_OK_AND_ASSIGN(auto model,
                       RemoteModel::Create(server.url(), TaskKind::Binary(), options));
  std::vector<std::vector<Value>> rows;
  for (int i = 0; i < 50; ++i) rows.push_back({Value{static_cast<double>(i)}});
  Dataset ds = MakeDataset({Num("x")}, rows);
  std::vector<Row> views = ds.Rows();
  ASSERT_OK_AND_ASSIGN(auto out, model->PredictBatch(ds.features(), views));
  ASSERT_EQ(out.size(), 50u);
  for (int i = 0; i < 50; ++i) EXPECT_DOUBLE_EQ(out[i].primary(), i / 100.0);
  EXPECT_EQ(server.requests(), 8);
}

TEST(RemoteModelTest, FailuresMapToBackendErrors) {
  FakeModelServer server;
  ASSERT_OK_AND_ASSIGN(auto model, RemoteModel::Create(server.url(), TaskKind::Binary()));
  std::vector<Feature> features = {Num("x")};
  std::vector<Value> r = {Value{1.0}};
  std::vector<Row> rows = {r};
  server.set_fail(true);
  absl::Status s = model->PredictBatch(features, rows).status();
  EXPECT_EQ(s.code(), absl::StatusCode::kUnavailable);
  EXPECT_THAT(std::string(s.message()), HasSubstr("http_status=503"));
  server.set_fail(false);
  server.set_garble(true);
  EXPECT_EQ(model->PredictBatch(features, rows).status().code(),
            absl::StatusCode::kDataLoss);

  RemoteOptions quick;
  quick.timeout = std::chrono::milliseconds(500);
  ASSERT_OK_AND_ASSIGN(auto dead, RemoteModel::Create("http://127.0.0.1:1/predict",
                                                      TaskKind::Binary(), quick));
  EXPECT_EQ(dead->PredictBatch(features, rows).status().code(),
            absl::StatusCode::kUnavailable);
}

}  // namespace
}  // namespace whatif
