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

#include <limits>
#include <random>

#include "hlsr/huffman.hpp"
#include "support/oracles.hpp"

namespace {

using namespace hlsr::huffman;
using hlsr::Error;
using hlsr::ErrorKind;

constexpr Symbol A = 0, B = 1, C = 2, D = 3, E = 4, F = 5;

SortedFreqTable four_symbols() { return SortedFreqTable({{A, 1}, {B, 1}, {C, 2}, {D, 4}}); }

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::io;
}

TEST(SortedFreqTable, RejectsBadInput) {
  EXPECT_EQ(kind_of([] { SortedFreqTable({{A, 1}}); }), ErrorKind::invalid_input);
  EXPECT_EQ(kind_of([] { SortedFreqTable({}); }), ErrorKind::invalid_input);
  EXPECT_EQ(kind_of([] { SortedFreqTable({{A, 0}, {B, 1}}); }), ErrorKind::invalid_input);
  EXPECT_EQ(kind_of([] { SortedFreqTable({{A, 1}, {A, 2}}); }), ErrorKind::invalid_input);
  try {
    SortedFreqTable({{A, 3}, {B, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("input not sorted by frequency"), std::string::npos);
  }
}

TEST(Reference, TwoSymbols) {
  const auto lengths = build_tree_reference(SortedFreqTable({{A, 1}, {B, 1}}));
  EXPECT_EQ(lengths, (BitLengthTable{{A, 1}, {B, 1}}));
}

TEST(Reference, FourSymbols) {
  EXPECT_EQ(build_tree_reference(four_symbols()), (BitLengthTable{{A, 3}, {B, 3}, {C, 2}, {D, 1}}));
}

// Six symbols whose optimal tree puts the two rarest four deep and the most
// frequent two deep.
TEST(Reference, RarestSymbolsSitDeepest) {
  const SortedFreqTable t({{F, 1}, {B, 1}, {C, 2}, {D, 3}, {E, 3}, {A, 5}});
  const auto lengths = build_tree_reference(t);
  EXPECT_EQ(lengths.at(F), 4u);
  EXPECT_EQ(lengths.at(B), 4u);
  EXPECT_EQ(lengths.at(A), 2u);
  EXPECT_EQ(compute_bit_lengths(build_tree_restructured(t), t), lengths);
}

TEST(Restructured, TwoSymbols) {
  const auto arrays = build_tree_restructured(SortedFreqTable({{A, 1}, {B, 1}}));
  EXPECT_EQ(arrays.num_internal, 1u);
  EXPECT_EQ(arrays.left, std::vector<NodeRef>{NodeRef::leaf(A)});
  EXPECT_EQ(arrays.right, std::vector<NodeRef>{NodeRef::leaf(B)});
  ASSERT_EQ(arrays.parent_address.size(), 1u);
  EXPECT_FALSE(arrays.parent_address[0].has_value());
}

TEST(Restructured, FourSymbolArrays) {
  const auto arrays = build_tree_restructured(four_symbols());
  ASSERT_EQ(arrays.num_internal, 3u);
  EXPECT_EQ(arrays.left[0], NodeRef::leaf(A));
  EXPECT_EQ(arrays.right[0], NodeRef::leaf(B));
  // c (2) ties with internal node 0 (2); the leaf is taken first
  EXPECT_EQ(arrays.left[1], NodeRef::leaf(C));
  EXPECT_EQ(arrays.right[1], NodeRef::internal_node());
  // internal node 1 (4) ties with d (4)
  EXPECT_EQ(arrays.left[2], NodeRef::leaf(D));
  EXPECT_EQ(arrays.right[2], NodeRef::internal_node());
  EXPECT_EQ(arrays.parent_address[0], std::optional<std::size_t>(1));
  EXPECT_EQ(arrays.parent_address[1], std::optional<std::size_t>(2));
  EXPECT_FALSE(arrays.parent_address[2].has_value());
  EXPECT_EQ(compute_bit_lengths(arrays, four_symbols()), (BitLengthTable{{A, 3}, {B, 3}, {C, 2}, {D, 1}}));
}

TEST(Restructured, Size536HasOneFewerInternalNodes) {
  std::mt19937_64 rng(536);
  const auto t = hlsr::testing::random_table(rng, 536, 10000);
  BuildTrace trace;
  const auto arrays = build_tree_restructured(t, &trace);
  EXPECT_EQ(arrays.num_internal, 535u);
  EXPECT_EQ(arrays.left.size(), 535u);
  EXPECT_EQ(trace.node_creations, 535u);
  EXPECT_EQ(trace.reorder_operations, 0u);
}

TEST(Restructured, InternalFrequenciesAreNondecreasing) {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 200; ++iter) {
    const auto t = hlsr::testing::random_table(rng, 2 + rng() % 300, 1000);
    BuildTrace trace;
    build_tree_restructured(t, &trace);
    ASSERT_EQ(trace.node_creations, t.size() - 1);
    for (std::size_t i = 1; i < trace.internal_freqs.size(); ++i) {
      ASSERT_LE(trace.internal_freqs[i - 1], trace.internal_freqs[i]);
    }
  }
}

TEST(Restructured, MatchesOracleOnRandomTables) {
  std::mt19937_64 rng(2024);
  for (int iter = 0; iter < 1000; ++iter) {
    const std::size_t n = 2 + rng() % 535;
    const auto t = hlsr::testing::random_table(rng, n, 10000);
    const auto lengths = compute_bit_lengths(build_tree_restructured(t), t);
    std::vector<std::uint64_t> freqs;
    for (const auto& e : t.entries()) freqs.push_back(e.freq);
    ASSERT_EQ(weighted_length(t, lengths), hlsr::testing::naive_optimal_weighted_length(freqs)) << "n=" << n;
    ASSERT_EQ(weighted_length(t, build_tree_reference(t)), weighted_length(t, lengths));
    ASSERT_TRUE(kraft_equality(lengths));
  }
}

TEST(Restructured, AllEqualFrequencies) {
  std::vector<SymbolFreq> e;
  for (Symbol s = 0; s < 64; ++s) e.push_back({s, 5});
  const SortedFreqTable t(e);
  const auto lengths = compute_bit_lengths(build_tree_restructured(t), t);
  for (const auto& [s, len] : lengths) EXPECT_EQ(len, 6u);
}

TEST(Restructured, Deterministic) {
  std::mt19937_64 rng(3);
  const auto t = hlsr::testing::random_table(rng, 100, 50);
  EXPECT_EQ(build_tree_restructured(t), build_tree_restructured(t));
}

TEST(Restructured, OverflowIsReported) {
  const Frequency big = std::numeric_limits<Frequency>::max() / 2 + 1;
  const SortedFreqTable t({{A, big}, {B, big}});
  EXPECT_EQ(kind_of([&] { build_tree_restructured(t); }), ErrorKind::overflow);
  EXPECT_EQ(kind_of([&] { build_tree_reference(t); }), ErrorKind::overflow);
}

TEST(BitLengths, StructuralErrors) {
  const auto t = four_symbols();
  auto arrays = build_tree_restructured(t);

  auto cyclic = arrays;
  cyclic.parent_address[1] = 0;
  EXPECT_EQ(kind_of([&] { compute_bit_lengths(cyclic, t); }), ErrorKind::structural);

  auto orphan = arrays;
  orphan.parent_address[0].reset();
  EXPECT_EQ(kind_of([&] { compute_bit_lengths(orphan, t); }), ErrorKind::structural);

  auto rooted = arrays;
  rooted.parent_address[2] = 1;
  EXPECT_EQ(kind_of([&] { compute_bit_lengths(rooted, t); }), ErrorKind::structural);

  auto short_arrays = arrays;
  short_arrays.left.pop_back();
  EXPECT_EQ(kind_of([&] { compute_bit_lengths(short_arrays, t); }), ErrorKind::structural);

  auto stranger = arrays;
  stranger.right[2] = NodeRef::leaf(99);
  EXPECT_EQ(kind_of([&] { compute_bit_lengths(stranger, t); }), ErrorKind::structural);
}

TEST(Kraft, Basics) {
  EXPECT_TRUE(kraft_equality({{A, 1}, {B, 1}}));
  EXPECT_TRUE(kraft_equality({{A, 1}, {B, 2}, {C, 2}}));
  EXPECT_FALSE(kraft_equality({{A, 1}, {B, 2}}));
  EXPECT_FALSE(kraft_equality({{A, 1}, {B, 1}, {C, 1}}));
  EXPECT_FALSE(kraft_equality({}));
}

}  // namespace
