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

#include "hlsr/codegen.hpp"
#include "support/harness.hpp"
#include "support/oracles.hpp"

namespace {

using namespace hlsr::codegen;
using hlsr::Error;

ConvParams conv(int k, int w, int h) {
  ConvParams p;
  p.k = k;
  p.width = w;
  p.height = h;
  return p;
}

HuffmanParams huff(int n) {
  HuffmanParams p;
  p.n = n;
  return p;
}

const GeneratedFile& file(const GeneratedSource& s, const std::string& name) {
  for (const auto& f : s.files) {
    if (f.name == name) return f;
  }
  throw std::runtime_error("missing " + name);
}

bool has_issue(const std::vector<ValidationIssue>& issues, const std::string& param, const std::string& text) {
  for (const auto& i : issues) {
    if (i.param == param && i.message.find(text) != std::string::npos) return true;
  }
  return false;
}

TEST(Validate, Conv) {
  EXPECT_TRUE(validate_params(TemplateId::conv2d_stream, conv(3, 640, 480)).empty());
  EXPECT_TRUE(has_issue(validate_params(TemplateId::conv2d_stream, conv(4, 640, 480)), "k", "K must be odd"));
  EXPECT_TRUE(has_issue(validate_params(TemplateId::conv2d_stream, conv(3, 2, 480)), "width", ">= K"));
  EXPECT_TRUE(has_issue(validate_params(TemplateId::conv2d_stream, conv(5, 10, 10)), "coefficients", "required"));
  auto bits = conv(3, 8, 8);
  bits.pixel_bits = 12;
  EXPECT_TRUE(has_issue(validate_params(TemplateId::conv2d_stream, bits), "pixel_bits", "8, 16, 32"));
  auto ragged = conv(3, 8, 8);
  ragged.coefficient_sets = {{{1, 2, 3}, {1, 2}, {1, 2, 3}}};
  EXPECT_TRUE(has_issue(validate_params(TemplateId::conv2d_stream, ragged), "coefficients", "K x K"));
  EXPECT_FALSE(validate_params(TemplateId::conv2d_stream, huff(4)).empty());
}

TEST(Validate, Huffman) {
  EXPECT_TRUE(validate_params(TemplateId::huffman_tree, huff(536)).empty());
  EXPECT_TRUE(has_issue(validate_params(TemplateId::huffman_tree, huff(1)), "n", "n ≥ 2"));
  auto narrow = huff(300);
  narrow.symbol_bits = 8;
  EXPECT_TRUE(has_issue(validate_params(TemplateId::huffman_tree, narrow), "n", "symbol_bits"));
  narrow.n = 255;
  EXPECT_TRUE(validate_params(TemplateId::huffman_tree, narrow).empty());
  EXPECT_THROW(instantiate(TemplateId::huffman_tree, huff(1)), Error);
}

TEST(Metadata, KernelClass) {
  EXPECT_EQ(kernel_class(TemplateId::conv2d_stream), KernelClass::regular);
  EXPECT_EQ(kernel_class(TemplateId::huffman_tree), KernelClass::irregular);
  EXPECT_EQ(parse_template_id("conv"), TemplateId::conv2d_stream);
  EXPECT_THROW(parse_template_id("fft"), Error);
}

TEST(Instantiate, ConvDeclaresLineBuffer) {
  const auto src = instantiate(TemplateId::conv2d_stream, conv(3, 640, 480));
  const auto& c = file(src, "conv2d_stream.c").text;
  EXPECT_NE(c.find("static pixel_t LineBuffer[3][640];"), std::string::npos);
  EXPECT_EQ(count_occurrences(c, "#pragma HLS PIPELINE II=1"), 1u);
  EXPECT_EQ(c.find("{{K"), std::string::npos);
  EXPECT_NE(c.find("WindowBuffer[3][3] = {{0}};"), std::string::npos);
  EXPECT_EQ(src.manifest["kernel_class"], "regular");
}

TEST(Instantiate, HuffmanDeclaresNodeArrays) {
  const auto src = instantiate(TemplateId::huffman_tree, huff(536));
  const auto& h = file(src, "huffman_tree.h").text;
  const auto& c = file(src, "huffman_tree.c").text;
  EXPECT_NE(h.find("addr_t ParentAddress[535]"), std::string::npos);
  EXPECT_NE(h.find("symbol_t Left[535]"), std::string::npos);
  EXPECT_NE(c.find("freq_t IN[535];"), std::string::npos);
  EXPECT_EQ(count_occurrences(c, "#pragma HLS PIPELINE II=1"), 2u);
  EXPECT_EQ(src.manifest["kernel_class"], "irregular");
}

TEST(Instantiate, Deterministic) {
  const auto a = instantiate(TemplateId::conv2d_stream, conv(3, 64, 48));
  const auto b = instantiate(TemplateId::conv2d_stream, conv(3, 64, 48));
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(a.files[i].text, b.files[i].text);
  EXPECT_EQ(manifest_text(a), manifest_text(b));
}

TEST(Instantiate, ParamsJsonRoundTrip) {
  auto p = conv(5, 20, 10);
  p.coefficient_sets = {std::vector<std::vector<int>>(5, std::vector<int>(5, 1))};
  const auto j = params_to_json(TemplateId::conv2d_stream, p);
  const auto back = std::get<ConvParams>(params_from_json(TemplateId::conv2d_stream, j));
  EXPECT_EQ(back.k, 5);
  EXPECT_EQ(back.coefficient_sets, p.coefficient_sets);
  EXPECT_THROW(params_from_json(TemplateId::huffman_tree, nlohmann::json::object()), Error);
}

TEST(Golden, CanonicalSetsMatch) {
  namespace fs = std::filesystem;
  const fs::path golden(HLSR_GOLDEN_DIR);
  const std::pair<std::string, GeneratedSource> cases[] = {
      {"conv2d_stream_k3_640x480", instantiate(TemplateId::conv2d_stream, conv(3, 640, 480))},
      {"huffman_tree_n536", instantiate(TemplateId::huffman_tree, huff(536))},
  };
  for (const auto& [dir, src] : cases) {
    for (const auto& f : src.files) {
      EXPECT_EQ(hlsr::testing::slurp(golden / dir / f.name), f.text) << dir << "/" << f.name;
    }
    EXPECT_EQ(hlsr::testing::slurp(golden / dir / "manifest.json"), manifest_text(src)) << dir;
  }
}

TEST(Harness, ConvK3MatchesReference) {
  std::mt19937_64 rng(21);
  const auto img = hlsr::testing::random_image(rng, 37, 23);
  const auto out = hlsr::testing::run_generated_conv(conv(3, 37, 23), img.pixels, "k3");
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(*out, hlsr::stencil::convolve_reference(img, hlsr::stencil::SOBEL_GX_STANDARD,
                                                    hlsr::stencil::SOBEL_GY_STANDARD)
                      .values);
}

TEST(Harness, ConvK5MatchesNaive) {
  std::mt19937_64 rng(22);
  const auto img = hlsr::testing::random_image(rng, 19, 14);
  auto p = conv(5, 19, 14);
  std::uniform_int_distribution<int> c(-9, 9);
  for (int s = 0; s < 2; ++s) {
    CoefficientSet set(5, std::vector<int>(5));
    for (auto& row : set) {
      for (auto& v : row) v = c(rng);
    }
    p.coefficient_sets.push_back(set);
  }
  const auto out = hlsr::testing::run_generated_conv(p, img.pixels, "k5");
  ASSERT_TRUE(out.has_value());
  EXPECT_EQ(*out, hlsr::testing::naive_conv(img.pixels, 19, 14, 5, p.coefficient_sets));
}

TEST(Harness, HuffmanWeightedLength) {
  std::mt19937_64 rng(23);
  for (std::size_t n : {2u, 3u, 17u, 536u}) {
    const auto t = hlsr::testing::random_table(rng, n, 10000);
    const auto lengths = hlsr::testing::run_generated_huffman(t, "n" + std::to_string(n));
    ASSERT_TRUE(lengths.has_value());
    ASSERT_EQ(lengths->size(), n);
    std::vector<std::uint64_t> freqs;
    for (const auto& e : t.entries()) freqs.push_back(e.freq);
    EXPECT_EQ(hlsr::huffman::weighted_length(t, *lengths), hlsr::testing::naive_optimal_weighted_length(freqs));
  }
}

}  // namespace
