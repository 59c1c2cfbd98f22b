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

#include "hlsr/io.hpp"

namespace {

using namespace hlsr;

TEST(Pgm, RoundTrip) {
  const stencil::Image img(3, 2, {0, 1, 2, 253, 254, 255});
  const auto text = io::format_pgm(img);
  EXPECT_EQ(text.substr(0, 11), "P5\n3 2\n255\n");
  EXPECT_EQ(io::parse_pgm(text), img);
}

TEST(Pgm, CommentsInHeader) {
  const std::string text = std::string("P5\n# made by hand\n2 2\n# max\n255\n") + "\x01\x02\x03\x04";
  const auto img = io::parse_pgm(text);
  EXPECT_EQ(img.width, 2u);
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{1, 2, 3, 4}));
}

TEST(Pgm, Malformed) {
  EXPECT_THROW(io::parse_pgm("P2\n2 2\n255\n1234"), Error);
  EXPECT_THROW(io::parse_pgm("P5\n2 2\n65535\n12345678"), Error);
  EXPECT_THROW(io::parse_pgm("P5\n2 2\n255\n123"), Error);
  EXPECT_THROW(io::parse_pgm("P5\nx 2\n255\n1234"), Error);
  EXPECT_THROW(io::parse_pgm(""), Error);
}

TEST(Csv, FrequencyTable) {
  const auto t = io::parse_freq_csv("symbol,freq\n7,1\n3, 1\n\n9,4\n");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[1].symbol, 3u);
  EXPECT_EQ(io::format_freq_csv(t), "symbol,freq\n7,1\n3,1\n9,4\n");
}

TEST(Csv, FrequencyErrors) {
  EXPECT_THROW(io::parse_freq_csv("sym,f\n1,1\n2,2\n"), Error);
  EXPECT_THROW(io::parse_freq_csv("symbol,freq\n1,1\n2\n"), Error);
  EXPECT_THROW(io::parse_freq_csv("symbol,freq\n1,1\n2,x\n"), Error);
  EXPECT_THROW(io::parse_freq_csv("symbol,freq\n1,1\n-2,1\n"), Error);
  try {
    io::parse_freq_csv("symbol,freq\n1,5\n2,1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("input not sorted by frequency"), std::string::npos);
  }
}

TEST(Csv, ArraysAndLengths) {
  const huffman::SortedFreqTable t({{0, 1}, {1, 1}, {2, 2}});
  const auto arrays = huffman::build_tree_restructured(t);
  EXPECT_EQ(io::format_arrays_csv(arrays),
            "node,left,right,parent_address\n0,leaf:0,leaf:1,1\n1,leaf:2,internal,\n");
  EXPECT_EQ(io::format_lengths_csv(huffman::compute_bit_lengths(arrays, t)), "symbol,length\n0,2\n1,2\n2,1\n");
}

TEST(Csv, Response) {
  stencil::ResponseImage r{2, 1, stencil::ResponseMode::raw, {5, -3}};
  EXPECT_EQ(io::format_response_csv(r), "row,col,value\n0,0,5\n0,1,-3\n");
}

TEST(Kernel, Named) {
  EXPECT_EQ(io::resolve_kernel("sobel-standard").gx, stencil::SOBEL_GX_STANDARD);
  EXPECT_EQ(io::resolve_kernel("sobel-paper").gx, stencil::SOBEL_GX_PAPER);
}

TEST(Kernel, Json) {
  const auto k = io::parse_kernel_json(R"({"gx": [[1,2,3],[4,5,6],[7,8,9]], "gy": [[0,0,0],[0,1,0],[0,0,0]]})");
  EXPECT_EQ(k.gx(2, 0), 7);
  EXPECT_EQ(k.gy(1, 1), 1);
  EXPECT_THROW(io::parse_kernel_json(R"({"gx": [[1,2,3]], "gy": []})"), Error);
  EXPECT_THROW(io::parse_kernel_json(R"({"gx": [[1,2,3],[4,5,6],[7,8,900]], "gy": [[0,0,0],[0,1,0],[0,0,0]]})"),
               Error);
  EXPECT_THROW(io::parse_kernel_json("{"), Error);
}

TEST(Display, Clamps) {
  stencil::ResponseImage r{3, 1, stencil::ResponseMode::raw, {-5, 100, 400}};
  EXPECT_EQ(io::to_display_image(r).pixels, (std::vector<std::uint8_t>{0, 100, 255}));
}

}  // namespace
