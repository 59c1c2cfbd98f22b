// Copyright 2026 The hlsr Authors
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

#include <gtest/gtest.h>

#include <random>

#include "hlsr/dse.hpp"
#include "support/oracles.hpp"

namespace {

using namespace hlsr::dse;
using hlsr::Error;
using hlsr::ErrorKind;

const auto kTable = hlsr::cycle_model::paper_table_profile();

std::vector<DesignPoint> points_of(const std::vector<Metrics>& metrics) {
  std::vector<DesignPoint> out;
  for (const auto& m : metrics) out.push_back({TemplateId::conv2d_stream, {}, m});
  return out;
}

Assignment conv_point(const std::string& style, std::int64_t width) {
  return {{{"style", style}, {"k", std::int64_t{3}}, {"width", width}, {"height", std::int64_t{480}}}};
}

TEST(Bram, ConvLineBuffer) {
  EXPECT_EQ(estimate_bram(TemplateId::conv2d_stream, conv_point("restructured", 640)), 3u);
  EXPECT_EQ(estimate_bram(TemplateId::conv2d_stream, conv_point("restructured", 16)), 0u);
  EXPECT_EQ(estimate_bram(TemplateId::conv2d_stream, conv_point("software", 640)), 0u);
  // a row over one block spills into a second
  EXPECT_EQ(estimate_bram(TemplateId::conv2d_stream, conv_point("restructured", 4096)), 6u);
}

TEST(Bram, Huffman) {
  EXPECT_EQ(estimate_bram(TemplateId::huffman_tree, {{{"style", std::string("restructured")}}}), 2u);
  EXPECT_EQ(estimate_bram(TemplateId::huffman_tree, {{{"style", std::string("software")}}}), 9u);
}

TEST(Bram, BlockArithmetic) {
  const BramModel m;
  EXPECT_EQ(blocks_for_array(1024, m), 0u);
  EXPECT_EQ(blocks_for_array(1025, m), 1u);
  EXPECT_EQ(blocks_for_array(18432, m), 1u);
  EXPECT_EQ(blocks_for_array(18433, m), 2u);
}

TEST(Explore, SingletonSpace) {
  SearchSpace s;
  s.params = {{"width", {std::int64_t{640}}}, {"height", {std::int64_t{480}}}};
  const auto pts = explore(s, kTable);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].metrics, (Metrics{307200, 3}));
}

TEST(Explore, TwoStyles) {
  SearchSpace s;
  s.params = {{"style", {std::string("software"), std::string("restructured")}},
              {"width", {std::int64_t{640}}},
              {"height", {std::int64_t{480}}}};
  const auto pts = explore(s, kTable);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_DOUBLE_EQ(static_cast<double>(pts[0].metrics.cycles) / static_cast<double>(pts[1].metrics.cycles),
                   20889601.0 / 307200.0);
  EXPECT_EQ(pareto_indices(pts), (std::vector<std::size_t>{0, 1}));
}

TEST(Explore, LastParameterVariesFastest) {
  SearchSpace s;
  s.params = {{"width", {std::int64_t{8}, std::int64_t{16}}}, {"height", {std::int64_t{3}, std::int64_t{4}}}};
  const auto pts = explore(s, kTable);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_EQ(pts[1].params.integer("width", 0), 8);
  EXPECT_EQ(pts[1].params.integer("height", 0), 4);
  EXPECT_EQ(pts[2].params.integer("width", 0), 16);
}

TEST(Explore, Errors) {
  SearchSpace empty;
  EXPECT_THROW(explore(empty, kTable), Error);
  SearchSpace hollow;
  hollow.params = {{"width", {}}};
  EXPECT_THROW(explore(hollow, kTable), Error);
  SearchSpace big;
  for (int d = 0; d < 6; ++d) {
    std::vector<ParamValue> v;
    for (std::int64_t i = 0; i < 10; ++i) v.emplace_back(i + 3);
    big.params.emplace_back("p" + std::to_string(d), v);
  }
  try {
    explore(big, kTable);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::limit);
  }
}

TEST(Pareto, Examples) {
  EXPECT_EQ(pareto_indices(points_of({{10, 1}, {5, 2}, {10, 2}})), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(pareto_indices(points_of({{7, 7}, {7, 7}, {7, 7}})), (std::vector<std::size_t>{0}));
  EXPECT_EQ(pareto_indices(points_of({{20889601, 0}, {307200, 3}})), (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(pareto_indices({}), Error);
}

TEST(Pareto, MatchesBruteForce) {
  std::mt19937_64 rng(41);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Metrics> m(1 + rng() % 60);
    for (auto& x : m) x = {rng() % 12, rng() % 12};
    const auto pts = points_of(m);
    ASSERT_TRUE(hlsr::testing::brute_force_frontier_ok(pts, pareto_indices(pts)));
  }
}

TEST(Json, SpaceAndCsv) {
  const auto j = nlohmann::ordered_json::parse(
      R"({"template": "conv2d_stream", "params": {"style": ["software", "restructured"], "width": [640], "height": [480]}})");
  const auto s = space_from_json(j);
  ASSERT_EQ(s.params.size(), 3u);
  EXPECT_EQ(s.params[0].first, "style");
  const auto csv = format_results_csv(s, explore(s, kTable));
  EXPECT_EQ(csv,
            "style,width,height,cycles,bram,on_frontier\n"
            "software,640,480,20889601,0,1\n"
            "restructured,640,480,307200,3,1\n");
  EXPECT_THROW(space_from_json(nlohmann::ordered_json::parse(R"({"template": "conv", "params": {"k": [1.5]}})")),
               Error);
}

}  // namespace
